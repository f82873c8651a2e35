#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "cohortmn/cohort.hpp"
#include "cohortmn/errors.hpp"
#include "cohortmn/matrix.hpp"
#include "cohortmn/rng.hpp"

namespace cohortmn {

/// One individual's realized trajectory, as the occupied state index
/// per cycle (length horizon + 1).
struct IndividualPath {
  std::vector<std::uint32_t> states;
};

namespace detail {

/// Categorical tables for every matrix the horizon touches.
inline std::vector<std::vector<rng::CategoricalTable>> build_sampler_tables(
    const CohortSpec& spec) {
  const std::size_t s = spec.state_space.size();
  const std::size_t distinct =
      std::min<std::size_t>(spec.horizon, spec.schedule.matrices.size());
  std::vector<std::vector<rng::CategoricalTable>> tables;
  tables.reserve(std::max<std::size_t>(distinct, 1));
  for (std::size_t m = 0; m < std::max<std::size_t>(distinct, 1); ++m) {
    const Matrix& matrix =
        spec.schedule.matrices[std::min(m, spec.schedule.matrices.size() - 1)];
    std::vector<rng::CategoricalTable> rows;
    rows.reserve(s);
    for (std::size_t k = 0; k < s; ++k) {
      rows.push_back(rng::CategoricalTable::from_probabilities(matrix.row(k)));
    }
    tables.push_back(std::move(rows));
  }
  return tables;
}

}  // namespace detail

/// Simulates every individual's Markov chain for one replication and
/// aggregates occupancy indicators into per-cycle counts. Individuals
/// are assigned their initial states by partitioning the cohort in
/// state-label order, then each draws one categorical transition per
/// cycle by inverse CDF over the governing matrix row. Identical
/// (spec, replication_seed) inputs give bit-identical output.
///
/// `paths`, when non-null, receives the full per-individual
/// trajectories (memory O(n0 * horizon)).
inline CountMatrix simulate_cohort(const CohortSpec& spec,
                                   std::uint64_t replication_seed,
                                   std::vector<IndividualPath>* paths = nullptr) {
  spec.validate();
  const std::size_t s = spec.state_space.size();
  const std::size_t n = static_cast<std::size_t>(spec.population);
  const std::size_t horizon = spec.horizon;

  const auto tables = detail::build_sampler_tables(spec);

  std::vector<std::uint32_t> state(n);
  {
    std::size_t j = 0;
    for (std::size_t k = 0; k < s; ++k) {
      for (std::int64_t i = 0; i < spec.initial_counts[k]; ++i) {
        state[j++] = static_cast<std::uint32_t>(k);
      }
    }
  }

  if (paths) {
    paths->assign(n, IndividualPath{});
    for (std::size_t j = 0; j < n; ++j) {
      (*paths)[j].states.reserve(horizon + 1);
      (*paths)[j].states.push_back(state[j]);
    }
  }

  CountMatrix counts(horizon + 1, s, 0);
  for (std::size_t k = 0; k < s; ++k) counts(0, k) = spec.initial_counts[k];

  rng::Xoshiro256pp generator(replication_seed);
  for (std::size_t z = 0; z < horizon; ++z) {
    const auto& rows = tables[std::min(z, tables.size() - 1)];
    auto next_counts = counts.row(z + 1);
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t to = static_cast<std::uint32_t>(
          rows[state[j]].sample(rng::uniform01(generator)));
      state[j] = to;
      ++next_counts[to];
      if (paths) (*paths)[j].states.push_back(to);
    }
  }
  return counts;
}

/// Empirical per-cycle moments across replications.
struct ReplicationSummary {
  std::int64_t replications = 0;
  std::uint64_t master_seed = 0;
  Matrix empirical_mean;      // (Z+1) x s, persons
  Matrix empirical_variance;  // (Z+1) x s, persons^2, divisor r - 1
};

struct ReplicateOptions {
  unsigned threads = 0;     // 0 = hardware concurrency
  bool store_paths = false;
};

/// Retained trajectories, indexed [replication][individual].
using PathStore = std::vector<std::vector<IndividualPath>>;

/// Runs `replications` independent cohort simulations with seeds
/// derived from (master_seed, replication index) and returns unbiased
/// empirical means and variances per (cycle, state).
///
/// Count sums and sums of squares are accumulated in integers, so the
/// result is exact and independent of execution order: any thread count
/// produces bit-identical summaries.
inline ReplicationSummary replicate(const CohortSpec& spec,
                                    std::int64_t replications,
                                    std::uint64_t master_seed,
                                    const ReplicateOptions& options = {},
                                    PathStore* paths = nullptr) {
  if (replications < 2) {
    throw InsufficientReplications("need at least 2 replications, got " +
                                   std::to_string(replications));
  }
  spec.validate();
  const std::size_t s = spec.state_space.size();
  const std::size_t cells = (spec.horizon + 1) * s;

  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::int64_t>(threads, replications));

  const bool store = options.store_paths && paths != nullptr;
  if (store) paths->assign(static_cast<std::size_t>(replications), {});

  std::vector<std::vector<std::int64_t>> partial_sums(
      threads, std::vector<std::int64_t>(cells, 0));
  std::vector<std::vector<unsigned __int128>> partial_squares(
      threads, std::vector<unsigned __int128>(cells, 0));

  std::atomic<std::int64_t> next_index{0};
  auto worker = [&](unsigned tid) {
    auto& sums = partial_sums[tid];
    auto& squares = partial_squares[tid];
    for (;;) {
      const std::int64_t r = next_index.fetch_add(1);
      if (r >= replications) break;
      const std::uint64_t seed = rng::derive_stream_seed(
          master_seed, static_cast<std::uint64_t>(r));
      std::vector<IndividualPath>* slot =
          store ? &(*paths)[static_cast<std::size_t>(r)] : nullptr;
      const CountMatrix counts = simulate_cohort(spec, seed, slot);
      const auto& flat = counts.data();
      for (std::size_t i = 0; i < cells; ++i) {
        sums[i] += flat[i];
        squares[i] += static_cast<unsigned __int128>(flat[i]) *
                      static_cast<unsigned __int128>(flat[i]);
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }

  // Integer merge commutes, so the partial order cannot matter.
  std::vector<std::int64_t> sums(cells, 0);
  std::vector<unsigned __int128> squares(cells, 0);
  for (unsigned t = 0; t < threads; ++t) {
    for (std::size_t i = 0; i < cells; ++i) {
      sums[i] += partial_sums[t][i];
      squares[i] += partial_squares[t][i];
    }
  }

  ReplicationSummary summary;
  summary.replications = replications;
  summary.master_seed = master_seed;
  summary.empirical_mean = Matrix(spec.horizon + 1, s);
  summary.empirical_variance = Matrix(spec.horizon + 1, s);
  const double r = static_cast<double>(replications);
  for (std::size_t z = 0; z <= spec.horizon; ++z) {
    for (std::size_t k = 0; k < s; ++k) {
      const std::size_t i = z * s + k;
      summary.empirical_mean(z, k) = static_cast<double>(sums[i]) / r;
      // r * sum(x^2) - (sum x)^2 is exact in 128-bit integers; the
      // numerator is non-negative by Cauchy-Schwarz.
      const unsigned __int128 sum_sq =
          static_cast<unsigned __int128>(sums[i]) *
          static_cast<unsigned __int128>(sums[i]);
      const unsigned __int128 numerator =
          static_cast<unsigned __int128>(replications) * squares[i] - sum_sq;
      summary.empirical_variance(z, k) =
          static_cast<double>(numerator) / (r * (r - 1.0));
    }
  }
  return summary;
}

}  // namespace cohortmn
