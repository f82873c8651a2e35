#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cohortmn/cohort.hpp"
#include "cohortmn/errors.hpp"
#include "cohortmn/matrix.hpp"
#include "cohortmn/microsim.hpp"
#include "cohortmn/rng.hpp"
#include "cohortmn/schedule.hpp"

namespace cohortmn {

/// One Dirichlet distribution per origin state, parameterizing belief
/// over that row of the transition matrix.
struct DirichletRows {
  Matrix alphas;  // s x s, all entries positive

  std::size_t states() const { return alphas.rows(); }

  void validate() const {
    if (alphas.empty() || !alphas.square()) {
      throw BadDimension("concentration matrix must be square and non-empty");
    }
    for (std::size_t k = 0; k < alphas.rows(); ++k) {
      for (std::size_t l = 0; l < alphas.cols(); ++l) {
        if (!(alphas(k, l) > 0.0)) {
          throw ValidationError(
              "concentration parameters must be positive; entry (" +
              std::to_string(k + 1) + "," + std::to_string(l + 1) + ") is " +
              std::to_string(alphas(k, l)));
        }
      }
    }
  }

  /// Minimal-commitment default: every concentration parameter equal.
  static DirichletRows uniform(std::size_t states, double alpha = 1.0) {
    return DirichletRows{Matrix(states, states, alpha)};
  }

  friend bool operator==(const DirichletRows&, const DirichletRows&) = default;
};

/// Observed one-cycle transitions; entry (k, l) counts moves from state
/// k to state l. Row totals equal observed person-cycles departing k.
struct TransitionCounts {
  CountMatrix counts;

  std::size_t states() const { return counts.rows(); }

  void validate() const {
    if (counts.empty() || !counts.square()) {
      throw BadDimension("count matrix must be square and non-empty");
    }
    for (std::size_t k = 0; k < counts.rows(); ++k) {
      for (std::size_t l = 0; l < counts.cols(); ++l) {
        if (counts(k, l) < 0) {
          throw ValidationError("transition counts must be non-negative");
        }
      }
    }
  }

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (std::int64_t c : counts.data()) sum += c;
    return sum;
  }

  friend bool operator==(const TransitionCounts&,
                         const TransitionCounts&) = default;
};

/// Tallies consecutive state pairs across paths. Every path entry must
/// be a valid state index.
inline TransitionCounts count_transitions(std::span<const IndividualPath> paths,
                                          std::size_t states) {
  if (states == 0) throw BadDimension("state count must be at least 1");
  TransitionCounts tally{CountMatrix(states, states, 0)};
  for (const IndividualPath& path : paths) {
    for (std::uint32_t state : path.states) {
      if (state >= states) {
        throw ValidationError("path contains state index " +
                              std::to_string(state + 1) + " outside 1.." +
                              std::to_string(states));
      }
    }
    for (std::size_t z = 0; z + 1 < path.states.size(); ++z) {
      ++tally.counts(path.states[z], path.states[z + 1]);
    }
  }
  return tally;
}

/// Schedule-aware overload: refuses to pool observations generated
/// under a time-varying schedule, where consecutive pairs would mix
/// different parameters.
inline TransitionCounts count_transitions(const CohortSpec& spec,
                                          std::span<const IndividualPath> paths) {
  if (spec.schedule.matrices.size() > 1) {
    throw TimeVaryingUnsupported(
        "transition tallies require a time-invariant schedule; this one has " +
        std::to_string(spec.schedule.matrices.size()) + " matrices");
  }
  return count_transitions(paths, spec.state_space.size());
}

/// Conjugate update: posterior concentration = prior + counts, row by
/// row. Rows with no observed departures keep their prior.
inline DirichletRows posterior_update(const DirichletRows& prior,
                                      const TransitionCounts& data) {
  prior.validate();
  data.validate();
  if (prior.states() != data.states()) {
    throw DimensionMismatch("prior covers " + std::to_string(prior.states()) +
                            " states, counts cover " +
                            std::to_string(data.states()));
  }
  DirichletRows posterior = prior;
  for (std::size_t k = 0; k < prior.states(); ++k) {
    for (std::size_t l = 0; l < prior.states(); ++l) {
      posterior.alphas(k, l) += static_cast<double>(data.counts(k, l));
    }
  }
  return posterior;
}

/// Posterior-mean transition matrix: each row of alphas normalized by
/// its sum. The result is a valid single-matrix schedule with
/// hold_last set.
inline TransitionSchedule posterior_mean(const DirichletRows& rows) {
  rows.validate();
  const std::size_t s = rows.states();
  Matrix mean(s, s);
  for (std::size_t k = 0; k < s; ++k) {
    double row_sum = 0.0;
    for (std::size_t l = 0; l < s; ++l) row_sum += rows.alphas(k, l);
    for (std::size_t l = 0; l < s; ++l) mean(k, l) = rows.alphas(k, l) / row_sum;
  }
  return validate_schedule({std::move(mean)}, s, /*hold_last=*/true);
}

/// Draws transition matrices from the row Dirichlets: each row is a
/// vector of independent gamma variates normalized by their sum.
/// Deterministic for a fixed seed.
inline std::vector<Matrix> sample_matrices(const DirichletRows& rows,
                                           std::size_t count,
                                           std::uint64_t seed) {
  rows.validate();
  if (count < 1) throw ValidationError("sample count must be at least 1");
  const std::size_t s = rows.states();
  rng::Xoshiro256pp generator(rng::derive_stream_seed(seed, 0));
  std::vector<Matrix> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Matrix matrix(s, s);
    for (std::size_t k = 0; k < s; ++k) {
      double row_sum = 0.0;
      std::size_t largest_alpha = 0;
      for (std::size_t l = 0; l < s; ++l) {
        matrix(k, l) = rng::sample_gamma(generator, rows.alphas(k, l));
        row_sum += matrix(k, l);
        if (rows.alphas(k, l) > rows.alphas(k, largest_alpha)) {
          largest_alpha = l;
        }
      }
      if (row_sum == 0.0) {
        // All draws underflowed (possible only for extremely small
        // alphas); the row is then effectively a point mass.
        for (std::size_t l = 0; l < s; ++l) matrix(k, l) = 0.0;
        matrix(k, largest_alpha) = 1.0;
      } else {
        for (std::size_t l = 0; l < s; ++l) matrix(k, l) /= row_sum;
      }
    }
    samples.push_back(std::move(matrix));
  }
  return samples;
}

}  // namespace cohortmn
