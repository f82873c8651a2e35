#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cohortmn/cohort.hpp"
#include "cohortmn/errors.hpp"
#include "cohortmn/matrix.hpp"
#include "cohortmn/occupancy.hpp"

namespace cohortmn {

using CovarianceMatrix = Matrix;

/// log of n! / (n_1! ... n_s!) via log-gamma, so large cohorts do not
/// overflow a direct factorial.
template <std::integral I>
double log_multinomial_coefficient(std::span<const I> counts) {
  I total = 0;
  double log_denominator = 0.0;
  for (I c : counts) {
    total += c;
    log_denominator += std::lgamma(static_cast<double>(c) + 1.0);
  }
  return std::lgamma(static_cast<double>(total) + 1.0) - log_denominator;
}

/// Probability that one individual realizes the given unit occupancy
/// indicator: the product of state probabilities raised to the
/// indicator entries, which reads off the occupied state's probability
/// (0^0 taken as 1).
inline double individual_pmf(const OccupancyDistribution& occupancy,
                             std::span<const int> indicator) {
  occupancy.validate();
  if (indicator.size() != occupancy.size()) {
    throw BadIndicator("indicator length " + std::to_string(indicator.size()) +
                       " vs " + std::to_string(occupancy.size()) + " states");
  }
  std::size_t ones = 0;
  std::size_t occupied = 0;
  for (std::size_t k = 0; k < indicator.size(); ++k) {
    if (indicator[k] == 1) {
      ++ones;
      occupied = k;
    } else if (indicator[k] != 0) {
      throw BadIndicator("indicator entries must be 0 or 1");
    }
  }
  if (ones != 1) {
    throw BadIndicator("indicator must mark exactly one occupied state, got " +
                       std::to_string(ones));
  }
  return occupancy.probs[occupied];
}

/// Covariance matrix of one individual's occupancy indicator:
/// p_k (1 - p_k) on the diagonal, -p_k p_l off it.
inline CovarianceMatrix individual_covariance(
    const OccupancyDistribution& occupancy) {
  occupancy.validate();
  const std::size_t s = occupancy.size();
  const auto& p = occupancy.probs;
  CovarianceMatrix cov(s, s);
  for (std::size_t k = 0; k < s; ++k) {
    for (std::size_t l = 0; l < s; ++l) {
      cov(k, l) = (k == l) ? p[k] * (1.0 - p[k]) : -(p[k] * p[l]);
    }
  }
  return cov;
}

/// Expected per-state head count of a closed cohort: n0 * p.
inline std::vector<double> cohort_mean(std::int64_t population,
                                       const OccupancyDistribution& occupancy) {
  occupancy.validate();
  if (population < 1) throw ValidationError("cohort size must be at least 1");
  std::vector<double> mean(occupancy.size());
  for (std::size_t k = 0; k < mean.size(); ++k) {
    mean[k] = static_cast<double>(population) * occupancy.probs[k];
  }
  return mean;
}

/// Covariance matrix of the cohort count vector. Individuals are
/// independent and identically distributed, so this is exactly n0 times
/// the individual covariance, entry by entry.
inline CovarianceMatrix cohort_covariance(
    std::int64_t population, const OccupancyDistribution& occupancy) {
  if (population < 1) throw ValidationError("cohort size must be at least 1");
  CovarianceMatrix cov = individual_covariance(occupancy);
  const double n = static_cast<double>(population);
  for (std::size_t k = 0; k < cov.rows(); ++k) {
    for (std::size_t l = 0; l < cov.cols(); ++l) cov(k, l) *= n;
  }
  return cov;
}

/// Log-probability of observing the count vector `counts` in a closed
/// cohort of `population` individuals with occupancy `occupancy`.
/// Computed fully in log space. Returns -infinity when some state holds
/// people but carries zero probability; zero-count states contribute
/// nothing (0 * log 0 taken as 0).
inline double cohort_log_pmf(std::int64_t population,
                             const OccupancyDistribution& occupancy,
                             std::span<const std::int64_t> counts) {
  occupancy.validate();
  if (counts.size() != occupancy.size()) {
    throw BadDimension("count vector covers " + std::to_string(counts.size()) +
                       " states, expected " + std::to_string(occupancy.size()));
  }
  std::int64_t total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw ValidationError("state counts must be non-negative");
    total += c;
  }
  if (total != population) {
    throw CountMismatch("counts sum to " + std::to_string(total) +
                        ", cohort size is " + std::to_string(population));
  }
  double log_p = log_multinomial_coefficient(counts);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    if (occupancy.probs[k] == 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    log_p += static_cast<double>(counts[k]) * std::log(occupancy.probs[k]);
  }
  return log_p;
}

inline double cohort_log_pmf(std::int64_t population,
                             const OccupancyDistribution& occupancy,
                             const CohortCount& counts) {
  return cohort_log_pmf(population, occupancy,
                        std::span<const std::int64_t>(counts));
}

/// Exact mean vector and covariance matrix of the cohort counts at each
/// cycle 0..Z.
struct MomentTrajectory {
  std::vector<std::vector<double>> means;      // (Z+1) x s
  std::vector<CovarianceMatrix> covariances;   // (Z+1) matrices, s x s

  /// Number of recorded cycles (horizon + 1).
  std::size_t cycles() const { return means.size(); }
  std::size_t states() const { return means.empty() ? 0 : means[0].size(); }
};

/// Walks the occupancy distribution across the horizon and records the
/// closed-form cohort mean and covariance at every cycle.
inline MomentTrajectory moment_trajectory(const CohortSpec& spec) {
  spec.validate();
  MomentTrajectory trajectory;
  trajectory.means.reserve(spec.horizon + 1);
  trajectory.covariances.reserve(spec.horizon + 1);

  OccupancyDistribution occupancy = spec.initial_occupancy();
  for (std::size_t z = 0;; ++z) {
    trajectory.means.push_back(cohort_mean(spec.population, occupancy));
    trajectory.covariances.push_back(
        cohort_covariance(spec.population, occupancy));
    if (z == spec.horizon) break;
    occupancy.probs =
        left_multiply(occupancy.probs, spec.schedule.matrix_for_cycle(z));
  }
  return trajectory;
}

}  // namespace cohortmn
