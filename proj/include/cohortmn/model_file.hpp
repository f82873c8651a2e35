#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cohortmn/cohort.hpp"
#include "cohortmn/errors.hpp"
#include "cohortmn/schedule.hpp"
#include "cohortmn/state_space.hpp"
#include "cohortmn/text_io.hpp"
#include "cohortmn/version.hpp"

namespace cohortmn {

/// One `from -> to` probability record. Diagonal records are allowed;
/// rows without one get their self-transition implied as the residual.
struct TransitionRecord {
  std::size_t from = 0;
  std::size_t to = 0;
  double probability = 0.0;

  friend bool operator==(const TransitionRecord&,
                         const TransitionRecord&) = default;
};

/// In-memory form of the declarative model text format. Records are
/// kept sorted by (from, to) within each block, which makes the
/// write/parse round trip exact.
struct ModelFile {
  std::vector<std::string> states;
  std::vector<std::vector<TransitionRecord>> blocks;  // one per matrix
  bool time_varying = false;  // written as `matrix` blocks when true
  std::vector<std::int64_t> initial_counts;
  std::int64_t cohort_size = 0;
  std::int64_t horizon = 0;
  double cycle_length = 1.0;
  bool hold_last = true;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

namespace detail {

struct ModelParser {
  std::string source;
  std::vector<std::string> states;
  std::vector<std::vector<TransitionRecord>> blocks;
  bool in_matrix_block = false;
  bool used_transition_form = false;
  bool used_matrix_form = false;
  std::vector<std::int64_t> initial_counts;
  std::vector<bool> initial_seen;
  std::optional<std::int64_t> cohort_size;
  std::optional<std::int64_t> horizon;
  std::optional<double> cycle_length;
  std::optional<bool> hold_last;
  std::optional<std::uint64_t> seed;

  [[noreturn]] void fail_parse(std::size_t line, const std::string& what) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
  }
  [[noreturn]] void fail_validation(std::size_t line, const std::string& what) {
    throw ValidationError(source + ":" + std::to_string(line) + ": " + what);
  }

  std::size_t state_index(std::string_view label, std::size_t line) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] == label) return i;
    }
    fail_validation(line, "unknown state '" + std::string(label) + "'");
  }

  void require_states(std::size_t line, std::string_view directive) {
    if (states.empty()) {
      fail_parse(line, std::string(directive) +
                           " before the states directive");
    }
  }

  void add_record(std::vector<TransitionRecord>& block, std::size_t line,
                  std::string_view from, std::string_view to,
                  std::string_view prob_token) {
    TransitionRecord record;
    record.from = state_index(from, line);
    record.to = state_index(to, line);
    const std::string context = source + ":" + std::to_string(line) +
                                ": transition " + std::string(from) + " -> " +
                                std::string(to);
    record.probability = parse_double_token(prob_token, context);
    if (!(record.probability >= 0.0 && record.probability <= 1.0)) {
      fail_validation(line, "transition " + std::string(from) + " -> " +
                                std::string(to) + " probability " +
                                std::string(prob_token) +
                                " is not in [0, 1]");
    }
    for (const TransitionRecord& existing : block) {
      if (existing.from == record.from && existing.to == record.to) {
        fail_validation(line, "duplicate transition " + std::string(from) +
                                  " -> " + std::string(to));
      }
    }
    block.push_back(record);
  }

  void handle(std::size_t line, const std::vector<std::string_view>& tokens) {
    const std::string_view directive = tokens.front();

    if (in_matrix_block) {
      if (directive == "end") {
        if (tokens.size() != 1) fail_parse(line, "end takes no arguments");
        in_matrix_block = false;
        return;
      }
      if (tokens.size() != 3) {
        fail_parse(line, "matrix rows are '<from> <to> <probability>'");
      }
      add_record(blocks.back(), line, tokens[0], tokens[1], tokens[2]);
      return;
    }

    if (directive == "states") {
      if (!states.empty()) fail_parse(line, "duplicate states directive");
      if (tokens.size() < 2) fail_parse(line, "states needs at least one label");
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const std::string label(tokens[i]);
        if (label.find(',') != std::string::npos ||
            label.find('"') != std::string::npos) {
          fail_validation(line, "state label '" + label +
                                    "' may not contain ',' or '\"'");
        }
        states.push_back(label);
      }
      StateSpace{states}.validate();
      initial_counts.assign(states.size(), 0);
      initial_seen.assign(states.size(), false);
    } else if (directive == "transition") {
      require_states(line, directive);
      if (used_matrix_form) {
        fail_validation(line,
                        "cannot mix transition records with matrix blocks");
      }
      if (tokens.size() != 4) {
        fail_parse(line, "transition is 'transition <from> <to> <probability>'");
      }
      used_transition_form = true;
      if (blocks.empty()) blocks.emplace_back();
      add_record(blocks.front(), line, tokens[1], tokens[2], tokens[3]);
    } else if (directive == "matrix") {
      require_states(line, directive);
      if (used_transition_form) {
        fail_validation(line,
                        "cannot mix matrix blocks with transition records");
      }
      if (tokens.size() != 1) fail_parse(line, "matrix takes no arguments");
      used_matrix_form = true;
      blocks.emplace_back();
      in_matrix_block = true;
    } else if (directive == "initial") {
      require_states(line, directive);
      if (tokens.size() != 3) {
        fail_parse(line, "initial is 'initial <state> <count>'");
      }
      const std::size_t k = state_index(tokens[1], line);
      if (initial_seen[k]) {
        fail_validation(line, "duplicate initial count for state '" +
                                  std::string(tokens[1]) + "'");
      }
      const std::int64_t count = parse_int_token(
          tokens[2], source + ":" + std::to_string(line) + ": initial count");
      if (count < 0) {
        fail_validation(line, "initial count for state '" +
                                  std::string(tokens[1]) + "' is negative");
      }
      initial_seen[k] = true;
      initial_counts[k] = count;
    } else if (directive == "cohort-size") {
      if (tokens.size() != 2 || cohort_size) {
        fail_parse(line, "cohort-size is 'cohort-size <n>' and may appear once");
      }
      cohort_size = parse_int_token(
          tokens[1], source + ":" + std::to_string(line) + ": cohort-size");
    } else if (directive == "horizon") {
      if (tokens.size() != 2 || horizon) {
        fail_parse(line, "horizon is 'horizon <cycles>' and may appear once");
      }
      horizon = parse_int_token(
          tokens[1], source + ":" + std::to_string(line) + ": horizon");
      if (*horizon < 0) fail_validation(line, "horizon must be >= 0");
    } else if (directive == "cycle-length") {
      if (tokens.size() != 2 || cycle_length) {
        fail_parse(line, "cycle-length is 'cycle-length <duration>'");
      }
      cycle_length = parse_double_token(
          tokens[1], source + ":" + std::to_string(line) + ": cycle-length");
      if (!(*cycle_length > 0.0)) {
        fail_validation(line, "cycle-length must be positive");
      }
    } else if (directive == "hold-last") {
      if (tokens.size() != 2 || hold_last) {
        fail_parse(line, "hold-last is 'hold-last <true|false>'");
      }
      if (tokens[1] == "true") {
        hold_last = true;
      } else if (tokens[1] == "false") {
        hold_last = false;
      } else {
        fail_parse(line, "hold-last expects true or false");
      }
    } else if (directive == "seed") {
      if (tokens.size() != 2 || seed) {
        fail_parse(line, "seed is 'seed <non-negative integer>'");
      }
      seed = parse_uint_token(
          tokens[1], source + ":" + std::to_string(line) + ": seed");
    } else {
      fail_parse(line, "unknown directive '" + std::string(directive) + "'");
    }
  }

  ModelFile finish() {
    if (in_matrix_block) {
      throw ParseError(source + ": matrix block never closed with 'end'");
    }
    if (states.empty()) {
      throw ParseError(source + ": missing required 'states' directive");
    }
    if (blocks.empty()) {
      throw ParseError(source +
                       ": missing transitions ('transition' records or "
                       "'matrix' blocks)");
    }
    if (!horizon) {
      throw ParseError(source + ": missing required 'horizon' directive");
    }

    ModelFile model;
    model.states = std::move(states);
    model.blocks = std::move(blocks);
    model.time_varying = used_matrix_form;
    for (auto& block : model.blocks) {
      std::sort(block.begin(), block.end(),
                [](const TransitionRecord& a, const TransitionRecord& b) {
                  return a.from != b.from ? a.from < b.from : a.to < b.to;
                });
    }
    model.initial_counts = std::move(initial_counts);
    std::int64_t total = 0;
    for (std::int64_t c : model.initial_counts) total += c;
    if (cohort_size && *cohort_size != total) {
      throw ValidationError(source + ": cohort-size " +
                            std::to_string(*cohort_size) +
                            " does not match initial counts totalling " +
                            std::to_string(total));
    }
    model.cohort_size = total;
    if (model.cohort_size < 1) {
      throw ValidationError(source +
                            ": initial counts must place at least one person");
    }
    model.horizon = *horizon;
    model.cycle_length = cycle_length.value_or(1.0);
    model.hold_last = hold_last.value_or(!model.time_varying);
    model.seed = seed;
    return model;
  }
};

}  // namespace detail

inline ModelFile parse_model(std::istream& in, std::string_view source_name) {
  detail::ModelParser parser;
  parser.source = std::string(source_name);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto tokens = tokenize_line(line);
    if (tokens.empty()) continue;
    parser.handle(line_number, tokens);
  }
  return parser.finish();
}

inline ModelFile parse_model_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  return parse_model(in, path.string());
}

/// Canonical text form; parse(format(model)) == model.
inline std::string format_model(const ModelFile& model) {
  std::ostringstream out;
  out << "# " << kToolName << " model v1\n";
  out << "states";
  for (const auto& label : model.states) out << ' ' << label;
  out << '\n';
  for (const auto& block : model.blocks) {
    if (model.time_varying) out << "matrix\n";
    for (const TransitionRecord& record : block) {
      if (model.time_varying) out << "  ";
      else out << "transition ";
      out << model.states[record.from] << ' ' << model.states[record.to] << ' '
          << format_double(record.probability) << '\n';
    }
    if (model.time_varying) out << "end\n";
  }
  for (std::size_t k = 0; k < model.initial_counts.size(); ++k) {
    if (model.initial_counts[k] != 0) {
      out << "initial " << model.states[k] << ' ' << model.initial_counts[k]
          << '\n';
    }
  }
  out << "cohort-size " << model.cohort_size << '\n';
  out << "horizon " << model.horizon << '\n';
  out << "cycle-length " << format_double(model.cycle_length) << '\n';
  out << "hold-last " << (model.hold_last ? "true" : "false") << '\n';
  if (model.seed) out << "seed " << *model.seed << '\n';
  return std::move(out).str();
}

inline void write_model_file(const ModelFile& model,
                             const std::filesystem::path& path) {
  write_file_atomic(path, format_model(model));
}

/// Builds the runnable cohort spec: materializes matrices with implied
/// diagonals, completes and checks them, and validates the cohort.
inline CohortSpec to_cohort_spec(const ModelFile& model,
                                 const ScheduleOptions& options = {}) {
  const std::size_t s = model.states.size();
  std::vector<Matrix> raw;
  raw.reserve(model.blocks.size());
  for (const auto& block : model.blocks) {
    Matrix matrix(s, s, 0.0);
    for (std::size_t k = 0; k < s; ++k) matrix(k, k) = kImpliedDiagonal;
    for (const TransitionRecord& record : block) {
      matrix(record.from, record.to) = record.probability;
    }
    raw.push_back(std::move(matrix));
  }

  CohortSpec spec;
  spec.state_space = StateSpace{model.states};
  spec.schedule = validate_schedule(std::move(raw), s, model.hold_last, options);
  spec.initial_counts = model.initial_counts;
  spec.population = model.cohort_size;
  spec.horizon = static_cast<std::size_t>(model.horizon);
  spec.cycle_length = model.cycle_length;
  spec.validate();
  return spec;
}

}  // namespace cohortmn
