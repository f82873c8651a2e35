// cohortmn: exact moments, microsimulation, and posterior updates for
// closed-cohort discrete-time state-transition models.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cohortmn/cohortmn.hpp"

namespace {

namespace cm = cohortmn;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitBadArguments = 4;
constexpr int kExitStatisticalFailure = 5;
constexpr int kExitDimensionMismatch = 6;

constexpr std::uint64_t kDefaultSeed = 1;

struct CommonOptions {
  std::string model_path;
  bool renormalize = false;
  std::optional<bool> hold_last_override;
};

struct SimulateArgs {
  std::int64_t replications = 1000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

cm::ModelFile load_model(const CommonOptions& common) {
  cm::ModelFile model = cm::parse_model_file(common.model_path);
  if (common.hold_last_override) model.hold_last = *common.hold_last_override;
  return model;
}

cm::CohortSpec make_spec(const cm::ModelFile& model,
                         const CommonOptions& common) {
  cm::ScheduleOptions options;
  options.renormalize = common.renormalize;
  std::vector<std::string> warnings;
  options.warnings = &warnings;
  cm::CohortSpec spec = cm::to_cohort_spec(model, options);
  for (const std::string& warning : warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  return spec;
}

std::uint64_t pick_seed(const SimulateArgs& args, const cm::ModelFile& model) {
  if (args.seed) return *args.seed;
  if (model.seed) return *model.seed;
  return kDefaultSeed;
}

std::string derived_cov_path(const std::string& out_path) {
  std::filesystem::path p(out_path);
  std::filesystem::path stem = p.stem();
  stem += "_cov";
  stem += p.extension();
  return (p.parent_path() / stem).string();
}

int run_moments(const CommonOptions& common, const std::string& out_path,
                std::string cov_path) {
  const cm::ModelFile model = load_model(common);
  const cm::CohortSpec spec = make_spec(model, common);
  const cm::MomentTrajectory trajectory = cm::moment_trajectory(spec);

  cm::CsvMetadata metadata;
  metadata.model = common.model_path;
  metadata.schema = "moments";
  cm::write_file_atomic(out_path,
                        cm::moments_csv(trajectory, spec.state_space, metadata));
  if (cov_path.empty()) cov_path = derived_cov_path(out_path);
  metadata.schema = "covariance";
  cm::write_file_atomic(
      cov_path, cm::covariance_csv(trajectory, spec.state_space, metadata));
  std::cout << "wrote " << out_path << " and " << cov_path << '\n';
  return kExitOk;
}

int run_simulate(const CommonOptions& common, const SimulateArgs& args,
                 const std::string& out_path, const std::string& paths_out) {
  const cm::ModelFile model = load_model(common);
  const cm::CohortSpec spec = make_spec(model, common);
  const std::uint64_t seed = pick_seed(args, model);

  cm::ReplicateOptions options;
  options.threads = args.threads;
  options.store_paths = !paths_out.empty();
  cm::PathStore paths;
  const cm::ReplicationSummary summary =
      cm::replicate(spec, args.replications, seed, options,
                    options.store_paths ? &paths : nullptr);

  cm::CsvMetadata metadata;
  metadata.schema = "simulation";
  metadata.model = common.model_path;
  metadata.seed = seed;
  metadata.replications = summary.replications;
  cm::write_file_atomic(
      out_path, cm::simulation_csv(summary, spec.state_space, metadata));
  std::cout << "wrote " << out_path << '\n';
  if (options.store_paths) {
    const bool time_varying = spec.schedule.matrices.size() > 1;
    cm::write_file_atomic(
        paths_out, cm::format_paths(paths, spec.state_space, time_varying));
    std::cout << "wrote " << paths_out << '\n';
  }
  return kExitOk;
}

int run_compare(const CommonOptions& common, const SimulateArgs& args,
                const std::string& sim_model_path,
                const std::string& report_path,
                const cm::CompareOptions& compare_options) {
  const cm::ModelFile model = load_model(common);
  const cm::CohortSpec spec = make_spec(model, common);
  const cm::MomentTrajectory trajectory = cm::moment_trajectory(spec);

  // The simulated engine may run a different model; that is how a
  // deliberate analytic-vs-simulated discrepancy is exercised.
  CommonOptions sim_common = common;
  cm::ModelFile sim_model = model;
  if (!sim_model_path.empty()) {
    sim_common.model_path = sim_model_path;
    sim_model = load_model(sim_common);
  }
  const cm::CohortSpec sim_spec = make_spec(sim_model, sim_common);
  const std::uint64_t seed = pick_seed(args, sim_model);

  cm::ReplicateOptions rep_options;
  rep_options.threads = args.threads;
  const cm::ReplicationSummary summary =
      cm::replicate(sim_spec, args.replications, seed, rep_options);

  const cm::ComparisonReport report =
      cm::compare(summary, trajectory, compare_options);

  if (!report_path.empty()) {
    cm::CsvMetadata metadata;
    metadata.schema = "comparison";
    metadata.model = common.model_path;
    metadata.seed = seed;
    metadata.replications = summary.replications;
    cm::write_file_atomic(
        report_path, cm::comparison_csv(report, spec.state_space, metadata));
  }

  std::size_t binding = 0;
  std::size_t degenerate = 0;
  for (const cm::ComparisonCell& cell : report.cells) {
    if (cell.binding) ++binding;
    if (cell.degenerate) ++degenerate;
  }
  std::cout << "cells: " << report.cells.size() << " (" << binding
            << " binding, " << degenerate << " degenerate)\n";
  std::cout << "max |z| binding: " << cm::format_double(report.max_abs_z)
            << ", all: " << cm::format_double(report.max_abs_z_all) << '\n';
  std::cout << "variance ratio range: [" << cm::format_double(report.ratio_min)
            << ", " << cm::format_double(report.ratio_max) << "]\n";
  std::cout << "fraction within |z| <= "
            << cm::format_double(compare_options.z_threshold) << ": "
            << cm::format_double(report.fraction_within) << '\n';
  if (!report_path.empty()) std::cout << "wrote " << report_path << '\n';
  std::cout << "result: " << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? kExitOk : kExitStatisticalFailure;
}

int run_posterior(const std::string& paths_path, const std::string& counts_path,
                  const std::string& prior_path, const std::string& out_path) {
  cm::StateSpace states;
  cm::TransitionCounts counts;
  if (!paths_path.empty()) {
    cm::ParsedPaths parsed = cm::read_paths_file(paths_path);
    if (parsed.time_varying) {
      throw cm::TimeVaryingUnsupported(
          paths_path + ": paths were generated under a time-varying "
                       "schedule; aggregated counts would mix different "
                       "transition matrices");
    }
    states = std::move(parsed.states);
    counts = cm::count_transitions(
        std::span<const cm::IndividualPath>(parsed.paths), states.size());
  } else {
    cm::ParsedCounts parsed = cm::read_counts_file(counts_path);
    states = std::move(parsed.states);
    counts = std::move(parsed.counts);
  }

  cm::DirichletRows prior =
      prior_path.empty() ? cm::DirichletRows::uniform(states.size())
                         : cm::read_prior_file(prior_path, states);
  const cm::DirichletRows posterior = cm::posterior_update(prior, counts);

  cm::CsvMetadata metadata;
  metadata.schema = "posterior";
  cm::write_file_atomic(
      out_path, cm::posterior_csv(prior, counts, posterior, states, metadata));
  std::cout << "prior: "
            << (prior_path.empty() ? std::string("uniform alpha=1")
                                   : prior_path)
            << '\n';
  std::cout << "observed transitions: " << counts.total() << '\n';
  std::cout << "wrote " << out_path << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(cm::kToolName) +
               " " + std::string(cm::kVersion) +
               ": exact and simulated moments of closed-cohort "
               "state-transition models"};
  app.require_subcommand(1);

  CommonOptions common;
  SimulateArgs sim_args;
  std::string out_path;
  std::string cov_path;
  std::string report_path;
  std::string paths_out;
  std::string sim_model_path;
  std::string paths_path;
  std::string counts_path;
  std::string prior_path;
  std::vector<double> ratio_band;
  cm::CompareOptions compare_options;

  auto add_model_options = [&](CLI::App* cmd) {
    cmd->add_option("--model", common.model_path, "model file to load")
        ->required();
    cmd->add_flag("--renormalize-rows", common.renormalize,
                  "repair rows whose sums drift from 1 beyond tolerance by "
                  "scaling them, with a warning per repaired row");
    cmd->add_flag(
        "--hold-last,!--no-hold-last",
        [&](std::int64_t count) { common.hold_last_override = count > 0; },
        "override whether the last matrix of a time-varying schedule "
        "applies beyond the listed cycles");
  };
  auto add_sim_options = [&](CLI::App* cmd) {
    cmd->add_option("--replications", sim_args.replications,
                    "independent cohort replications (>= 2)")
        ->capture_default_str();
    cmd->add_option("--seed", sim_args.seed,
                    "master seed; beats the model file's seed directive");
    cmd->add_option("--threads", sim_args.threads,
                    "worker threads, 0 = all hardware threads")
        ->capture_default_str();
  };

  CLI::App* moments =
      app.add_subcommand("moments", "write exact mean/variance/sd and "
                                    "covariance trajectories");
  add_model_options(moments);
  moments->add_option("--out", out_path, "mean/variance/sd CSV path")
      ->required();
  moments->add_option("--cov-out", cov_path,
                      "covariance CSV path (default: <out>_cov.<ext>)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "write empirical trajectories from "
                                     "replicated microsimulation");
  add_model_options(simulate);
  add_sim_options(simulate);
  simulate->add_option("--out", out_path, "empirical moments CSV path")
      ->required();
  simulate->add_option("--store-paths", paths_out,
                       "also write every individual trajectory to this file");

  CLI::App* cmp = app.add_subcommand(
      "compare", "run both engines and score empirical against exact moments");
  add_model_options(cmp);
  add_sim_options(cmp);
  cmp->add_option("--report", report_path, "per-cell comparison CSV path");
  cmp->add_option("--sim-model", sim_model_path,
                  "simulate this model instead of --model (the analytic "
                  "reference); used to detect engine disagreement");
  cmp->add_option("--z-threshold", compare_options.z_threshold,
                  "|z| bound for binding cells")
      ->capture_default_str();
  cmp->add_option("--ratio-band", ratio_band,
                  "variance ratio bounds for binding cells (low high)")
      ->expected(2);

  CLI::App* posterior = app.add_subcommand(
      "posterior", "update Dirichlet transition priors with observed counts");
  auto* paths_opt = posterior->add_option(
      "--paths", paths_path, "individual trajectory file to tally");
  auto* counts_opt =
      posterior->add_option("--counts", counts_path,
                            "pre-aggregated transition count file");
  paths_opt->excludes(counts_opt);
  counts_opt->excludes(paths_opt);
  posterior->add_option("--prior", prior_path,
                        "Dirichlet prior rows (default: all alpha = 1)");
  posterior->add_option("--out", out_path, "posterior CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadArguments;
  }

  try {
    if (moments->parsed()) return run_moments(common, out_path, cov_path);
    if (simulate->parsed()) {
      return run_simulate(common, sim_args, out_path, paths_out);
    }
    if (cmp->parsed()) {
      if (!ratio_band.empty()) {
        if (ratio_band[0] > ratio_band[1]) {
          std::cerr << "error: --ratio-band low exceeds high\n";
          return kExitBadArguments;
        }
        compare_options.ratio_low = ratio_band[0];
        compare_options.ratio_high = ratio_band[1];
      }
      return run_compare(common, sim_args, sim_model_path, report_path,
                         compare_options);
    }
    if (posterior->parsed()) {
      if (paths_path.empty() && counts_path.empty()) {
        std::cerr << "error: posterior needs --paths or --counts\n";
        return kExitBadArguments;
      }
      return run_posterior(paths_path, counts_path, prior_path, out_path);
    }
  } catch (const cm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const cm::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDimensionMismatch;
  } catch (const cm::InsufficientReplications& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadArguments;
  } catch (const cm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const cm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const cm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitBadArguments;
}
