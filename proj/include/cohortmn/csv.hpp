#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cohortmn/bayes.hpp"
#include "cohortmn/compare.hpp"
#include "cohortmn/errors.hpp"
#include "cohortmn/microsim.hpp"
#include "cohortmn/moments.hpp"
#include "cohortmn/state_space.hpp"
#include "cohortmn/text_io.hpp"
#include "cohortmn/version.hpp"

namespace cohortmn {

/// Lines prepended to every CSV, '#'-commented so spreadsheet tools and
/// pandas (comment='#') skip them. Deliberately free of timestamps and
/// host details: two runs with the same inputs produce identical bytes.
struct CsvMetadata {
  std::string schema;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<std::int64_t> replications;

  std::string header() const {
    std::ostringstream out;
    out << "# " << kToolName << ' ' << schema << " v1\n";
    out << "# tool-version: " << kVersion << '\n';
    if (model) out << "# model: " << *model << '\n';
    if (seed) {
      out << "# seed: " << *seed << '\n';
      out << "# rng: " << kRngId << '\n';
    }
    if (replications) out << "# replications: " << *replications << '\n';
    return std::move(out).str();
  }
};

namespace detail {

// NaN prints as an empty cell; consumers see a missing value, not "nan".
inline void append_cell(std::string& row, double value) {
  if (!std::isnan(value)) row += format_double(value);
}

}  // namespace detail

inline std::string moments_csv(const MomentTrajectory& trajectory,
                               const StateSpace& states,
                               const CsvMetadata& metadata) {
  std::string out = metadata.header();
  out += "cycle,state,mean,variance,sd\n";
  for (std::size_t t = 0; t < trajectory.cycles(); ++t) {
    const Matrix& cov = trajectory.covariances[t];
    for (std::size_t k = 0; k < states.size(); ++k) {
      const double variance = cov(k, k);
      out += std::to_string(t);
      out += ',';
      out += states.labels[k];
      out += ',';
      out += format_double(trajectory.means[t][k]);
      out += ',';
      out += format_double(variance);
      out += ',';
      out += format_double(std::sqrt(variance));
      out += '\n';
    }
  }
  return out;
}

inline std::string covariance_csv(const MomentTrajectory& trajectory,
                                  const StateSpace& states,
                                  const CsvMetadata& metadata) {
  std::string out = metadata.header();
  out += "cycle,state_u,state_v,covariance\n";
  for (std::size_t t = 0; t < trajectory.cycles(); ++t) {
    const Matrix& cov = trajectory.covariances[t];
    for (std::size_t u = 0; u < states.size(); ++u) {
      for (std::size_t v = 0; v < states.size(); ++v) {
        out += std::to_string(t);
        out += ',';
        out += states.labels[u];
        out += ',';
        out += states.labels[v];
        out += ',';
        out += format_double(cov(u, v));
        out += '\n';
      }
    }
  }
  return out;
}

inline std::string simulation_csv(const ReplicationSummary& summary,
                                  const StateSpace& states,
                                  const CsvMetadata& metadata) {
  std::string out = metadata.header();
  out += "cycle,state,empirical_mean,empirical_variance,replications,seed\n";
  const std::string suffix = "," + std::to_string(summary.replications) + "," +
                             std::to_string(summary.master_seed) + "\n";
  for (std::size_t t = 0; t < summary.empirical_mean.rows(); ++t) {
    for (std::size_t k = 0; k < states.size(); ++k) {
      out += std::to_string(t);
      out += ',';
      out += states.labels[k];
      out += ',';
      out += format_double(summary.empirical_mean(t, k));
      out += ',';
      out += format_double(summary.empirical_variance(t, k));
      out += suffix;
    }
  }
  return out;
}

inline std::string comparison_csv(const ComparisonReport& report,
                                  const StateSpace& states,
                                  const CsvMetadata& metadata) {
  std::string out = metadata.header();
  out +=
      "cycle,state,analytic_mean,empirical_mean,z,analytic_variance,"
      "empirical_variance,variance_ratio,degenerate\n";
  for (const ComparisonCell& cell : report.cells) {
    out += std::to_string(cell.cycle);
    out += ',';
    out += states.labels[cell.state];
    out += ',';
    detail::append_cell(out, cell.analytic_mean);
    out += ',';
    detail::append_cell(out, cell.empirical_mean);
    out += ',';
    detail::append_cell(out, cell.z);
    out += ',';
    detail::append_cell(out, cell.analytic_variance);
    out += ',';
    detail::append_cell(out, cell.empirical_variance);
    out += ',';
    detail::append_cell(out, cell.ratio);
    out += ',';
    out += cell.degenerate ? "true" : "false";
    out += '\n';
  }
  return out;
}

inline std::string posterior_csv(const DirichletRows& prior,
                                 const TransitionCounts& counts,
                                 const DirichletRows& posterior,
                                 const StateSpace& states,
                                 const CsvMetadata& metadata) {
  std::string out = metadata.header();
  out += "from,to,prior_alpha,count,posterior_alpha,posterior_mean\n";
  const std::size_t s = states.size();
  std::vector<double> row_totals(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      row_totals[i] += posterior.alphas(i, j);
    }
  }
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      out += states.labels[i];
      out += ',';
      out += states.labels[j];
      out += ',';
      out += format_double(prior.alphas(i, j));
      out += ',';
      out += std::to_string(counts.counts(i, j));
      out += ',';
      out += format_double(posterior.alphas(i, j));
      out += ',';
      out += format_double(row_totals[i] > 0.0
                               ? posterior.alphas(i, j) / row_totals[i]
                               : 0.0);
      out += '\n';
    }
  }
  return out;
}

/// Individual trajectory dump. One row per individual:
///   <replication> <individual> <state at cycle 0> ... <state at cycle Z>
/// States are written 1-based to match the CSV state ordering people see;
/// in memory everything stays 0-based.
inline std::string format_paths(const PathStore& paths,
                                const StateSpace& states, bool time_varying) {
  std::string out;
  out += "# " + std::string(kToolName) + " paths v1\n";
  out += "# states:";
  for (const auto& label : states.labels) {
    out += ' ';
    out += label;
  }
  out += '\n';
  out += "# schedule: ";
  out += time_varying ? "time-varying" : "time-invariant";
  out += '\n';
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (std::size_t i = 0; i < paths[r].size(); ++i) {
      out += std::to_string(r);
      out += ' ';
      out += std::to_string(i);
      for (std::uint32_t state : paths[r][i].states) {
        out += ' ';
        out += std::to_string(state + 1);
      }
      out += '\n';
    }
  }
  return out;
}

struct ParsedPaths {
  StateSpace states;
  bool time_varying = false;
  std::vector<IndividualPath> paths;  // flattened across replications
};

inline ParsedPaths parse_paths(std::istream& in, std::string_view source_name) {
  ParsedPaths result;
  bool saw_states = false;
  std::string line;
  std::size_t line_number = 0;
  std::size_t path_length = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string where =
        std::string(source_name) + ":" + std::to_string(line_number);
    if (!line.empty() && line.front() == '#') {
      std::istringstream header(line.substr(1));
      std::string key;
      header >> key;
      if (key == "states:") {
        std::string label;
        while (header >> label) result.states.labels.push_back(label);
        if (result.states.labels.empty()) {
          throw ParseError(where + ": empty states header");
        }
        result.states.validate();
        saw_states = true;
      } else if (key == "schedule:") {
        std::string kind;
        header >> kind;
        if (kind == "time-varying") {
          result.time_varying = true;
        } else if (kind != "time-invariant") {
          throw ParseError(where + ": schedule must be time-invariant or "
                                   "time-varying, got '" + kind + "'");
        }
      }
      continue;
    }
    const auto tokens = tokenize_line(line);
    if (tokens.empty()) continue;
    if (!saw_states) {
      throw ParseError(where + ": path rows before the '# states:' header");
    }
    if (tokens.size() < 3) {
      throw ParseError(where +
                       ": path rows are '<replication> <individual> "
                       "<state>...' with at least one state");
    }
    parse_uint_token(tokens[0], where + ": replication");
    parse_uint_token(tokens[1], where + ": individual");
    IndividualPath path;
    path.states.reserve(tokens.size() - 2);
    for (std::size_t c = 2; c < tokens.size(); ++c) {
      const std::uint64_t one_based =
          parse_uint_token(tokens[c], where + ": state index");
      if (one_based < 1 || one_based > result.states.size()) {
        throw ValidationError(where + ": state index " +
                              std::to_string(one_based) + " out of range 1.." +
                              std::to_string(result.states.size()));
      }
      path.states.push_back(static_cast<std::uint32_t>(one_based - 1));
    }
    if (path_length == 0) {
      path_length = path.states.size();
    } else if (path.states.size() != path_length) {
      throw ValidationError(where + ": path has " +
                            std::to_string(path.states.size()) +
                            " cycles, expected " +
                            std::to_string(path_length));
    }
    result.paths.push_back(std::move(path));
  }
  if (!saw_states) {
    throw ParseError(std::string(source_name) + ": missing '# states:' header");
  }
  return result;
}

inline ParsedPaths read_paths_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  return parse_paths(in, path.string());
}

/// Aggregated transition tallies:
///   states <label>...
///   count <from-label> <int per to-state>
/// Rows that never appear hold zero counts.
inline std::string format_counts(const TransitionCounts& counts,
                                 const StateSpace& states) {
  std::string out;
  out += "# " + std::string(kToolName) + " counts v1\n";
  out += "states";
  for (const auto& label : states.labels) {
    out += ' ';
    out += label;
  }
  out += '\n';
  for (std::size_t i = 0; i < states.size(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (counts.counts(i, j) != 0) any = true;
    }
    if (!any) continue;
    out += "count ";
    out += states.labels[i];
    for (std::size_t j = 0; j < states.size(); ++j) {
      out += ' ';
      out += std::to_string(counts.counts(i, j));
    }
    out += '\n';
  }
  return out;
}

struct ParsedCounts {
  StateSpace states;
  TransitionCounts counts;
};

inline ParsedCounts parse_counts(std::istream& in,
                                 std::string_view source_name) {
  ParsedCounts result;
  bool saw_states = false;
  std::vector<bool> row_seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string where =
        std::string(source_name) + ":" + std::to_string(line_number);
    const auto tokens = tokenize_line(line);
    if (tokens.empty()) continue;
    if (tokens.front() == "states") {
      if (saw_states) throw ParseError(where + ": duplicate states line");
      if (tokens.size() < 2) {
        throw ParseError(where + ": states needs at least one label");
      }
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        result.states.labels.emplace_back(tokens[i]);
      }
      result.states.validate();
      result.counts.counts =
          CountMatrix(result.states.size(), result.states.size(), 0);
      row_seen.assign(result.states.size(), false);
      saw_states = true;
    } else if (tokens.front() == "count") {
      if (!saw_states) {
        throw ParseError(where + ": count rows before the states line");
      }
      if (tokens.size() != result.states.size() + 2) {
        throw ParseError(where + ": count rows are 'count <from> <" +
                         std::to_string(result.states.size()) +
                         " integers>'");
      }
      const std::string from(tokens[1]);
      std::size_t i = result.states.size();
      for (std::size_t k = 0; k < result.states.size(); ++k) {
        if (result.states.labels[k] == from) i = k;
      }
      if (i == result.states.size()) {
        throw ValidationError(where + ": unknown state '" + from + "'");
      }
      if (row_seen[i]) {
        throw ValidationError(where + ": duplicate count row for '" + from +
                              "'");
      }
      row_seen[i] = true;
      for (std::size_t j = 0; j < result.states.size(); ++j) {
        const std::int64_t value =
            parse_int_token(tokens[j + 2], where + ": count");
        if (value < 0) {
          throw ValidationError(where + ": negative transition count");
        }
        result.counts.counts(i, j) = value;
      }
    } else {
      throw ParseError(where + ": unknown directive '" +
                       std::string(tokens.front()) + "'");
    }
  }
  if (!saw_states) {
    throw ParseError(std::string(source_name) + ": missing states line");
  }
  return result;
}

inline ParsedCounts read_counts_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  return parse_counts(in, path.string());
}

/// Dirichlet prior rows:
///   alpha <from-label> <positive double per to-state>
/// Every state needs a row; there is no sensible default to invent.
inline DirichletRows parse_prior(std::istream& in, const StateSpace& states,
                                 std::string_view source_name) {
  const std::size_t s = states.size();
  DirichletRows prior;
  prior.alphas = Matrix(s, s, 0.0);
  std::vector<bool> row_seen(s, false);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string where =
        std::string(source_name) + ":" + std::to_string(line_number);
    const auto tokens = tokenize_line(line);
    if (tokens.empty()) continue;
    if (tokens.front() != "alpha") {
      throw ParseError(where + ": unknown directive '" +
                       std::string(tokens.front()) + "'");
    }
    if (tokens.size() < 2) {
      throw ParseError(where + ": alpha rows are 'alpha <from> <values>'");
    }
    if (tokens.size() != s + 2) {
      throw DimensionMismatch(where + ": alpha row has " +
                              std::to_string(tokens.size() - 2) +
                              " values but the data has " + std::to_string(s) +
                              " states");
    }
    const std::string from(tokens[1]);
    std::size_t i = s;
    for (std::size_t k = 0; k < s; ++k) {
      if (states.labels[k] == from) i = k;
    }
    if (i == s) {
      throw ValidationError(where + ": unknown state '" + from + "'");
    }
    if (row_seen[i]) {
      throw ValidationError(where + ": duplicate alpha row for '" + from + "'");
    }
    row_seen[i] = true;
    for (std::size_t j = 0; j < s; ++j) {
      const double value = parse_double_token(tokens[j + 2], where + ": alpha");
      if (!(value > 0.0)) {
        throw ValidationError(where + ": alpha values must be positive");
      }
      prior.alphas(i, j) = value;
    }
  }
  for (std::size_t i = 0; i < s; ++i) {
    if (!row_seen[i]) {
      throw ValidationError(std::string(source_name) +
                            ": missing alpha row for state '" +
                            states.labels[i] + "'");
    }
  }
  prior.validate();
  return prior;
}

inline DirichletRows read_prior_file(const std::filesystem::path& path,
                                     const StateSpace& states) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  return parse_prior(in, states, path.string());
}

}  // namespace cohortmn
