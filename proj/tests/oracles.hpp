// Slow, independent reference implementations the tests trust instead
// of the library's formulas. Everything here favors obviousness over
// speed: integer factorials, brute-force enumeration, Eigen linear
// algebra.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cohortmn/cohort.hpp"
#include "cohortmn/matrix.hpp"
#include "cohortmn/schedule.hpp"
#include "cohortmn/state_space.hpp"

namespace oracles {

/// Calls fn once per count vector with the given total, in
/// lexicographic order. parts >= 1.
inline void for_each_composition(
    std::int64_t total, std::size_t parts,
    const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  std::vector<std::int64_t> counts(parts, 0);
  const std::function<void(std::size_t, std::int64_t)> recurse =
      [&](std::size_t k, std::int64_t remaining) {
        if (k + 1 == parts) {
          counts[k] = remaining;
          fn(counts);
          return;
        }
        for (std::int64_t v = 0; v <= remaining; ++v) {
          counts[k] = v;
          recurse(k + 1, remaining - v);
        }
      };
  recurse(0, total);
}

/// Probability of one count vector by brute force: sums the product
/// probability of every one of the s^n ways to assign n labeled
/// individuals to states. No factorials anywhere.
inline double assignment_pmf(const std::vector<double>& p,
                             const std::vector<std::int64_t>& target) {
  const std::size_t s = p.size();
  std::int64_t n = 0;
  for (std::int64_t c : target) n += c;
  std::vector<std::size_t> assignment(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  while (true) {
    std::vector<std::int64_t> counts(s, 0);
    double prob = 1.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      ++counts[assignment[i]];
      prob *= p[assignment[i]];
    }
    if (counts == target) total += prob;
    std::size_t k = 0;
    while (k < assignment.size()) {
      if (++assignment[k] < s) break;
      assignment[k] = 0;
      ++k;
    }
    if (k == assignment.size()) break;
  }
  return total;
}

/// Exact multinomial pmf for small n via integer factorials.
inline double factorial_pmf(std::int64_t n, const std::vector<double>& p,
                            const std::vector<std::int64_t>& counts) {
  const auto factorial = [](std::int64_t v) {
    double r = 1.0;
    for (std::int64_t i = 2; i <= v; ++i) r *= static_cast<double>(i);
    return r;
  };
  double coefficient = factorial(n);
  double prob = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    coefficient /= factorial(counts[k]);
    for (std::int64_t i = 0; i < counts[k]; ++i) prob *= p[k];
  }
  return coefficient * prob;
}

/// Occupancy after `cycles` applications of a single matrix, through
/// Eigen rather than the library's propagation loop.
inline std::vector<double> eigen_propagate(const std::vector<double>& initial,
                                           const cohortmn::Matrix& matrix,
                                           std::size_t cycles) {
  const std::size_t s = initial.size();
  Eigen::RowVectorXd v(s);
  for (std::size_t k = 0; k < s; ++k) v(static_cast<Eigen::Index>(k)) = initial[k];
  Eigen::MatrixXd m(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          matrix(i, j);
    }
  }
  for (std::size_t z = 0; z < cycles; ++z) v = v * m;
  return std::vector<double>(v.data(), v.data() + s);
}

/// Smallest eigenvalue of a symmetric matrix, for PSD checks.
inline double min_eigenvalue(const cohortmn::Matrix& matrix) {
  const std::size_t s = matrix.rows();
  Eigen::MatrixXd m(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          matrix(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().minCoeff();
}

/// Random probability vector from independent uniforms, normalized.
/// Entries are bounded away from zero so log terms stay finite.
inline std::vector<double> random_simplex(std::mt19937_64& rng,
                                          std::size_t s) {
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  std::vector<double> p(s);
  double total = 0.0;
  for (double& v : p) {
    v = uniform(rng);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

/// Random row-stochastic matrix.
inline cohortmn::Matrix random_stochastic(std::mt19937_64& rng,
                                          std::size_t s) {
  cohortmn::Matrix m(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    const auto row = random_simplex(rng, s);
    for (std::size_t j = 0; j < s; ++j) m(i, j) = row[j];
  }
  return m;
}

/// The four-state progressive reference model used across tests:
/// S4 absorbs, everyone starts in S1.
inline cohortmn::CohortSpec reference_spec(std::int64_t population = 10000,
                                           std::size_t horizon = 50) {
  cohortmn::Matrix m(4, 4, 0.0);
  m(0, 0) = 0.71; m(0, 1) = 0.10; m(0, 2) = 0.05; m(0, 3) = 0.14;
  m(1, 1) = 0.76; m(1, 2) = 0.07; m(1, 3) = 0.17;
  m(2, 2) = 0.89; m(2, 3) = 0.11;
  m(3, 3) = 1.0;

  cohortmn::CohortSpec spec;
  spec.state_space = cohortmn::StateSpace::numbered(4);
  spec.schedule = cohortmn::validate_schedule({m}, 4, true);
  spec.initial_counts = {population, 0, 0, 0};
  spec.population = population;
  spec.horizon = horizon;
  spec.validate();
  return spec;
}

}  // namespace oracles
