#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cohortmn/errors.hpp"
#include "cohortmn/schedule.hpp"

namespace cohortmn {

/// Probability vector of a single individual's state at one cycle.
struct OccupancyDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }

  void validate() const {
    if (probs.empty()) throw BadDimension("occupancy vector is empty");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw NotStochastic("occupancy entry " + std::to_string(p) +
                            " is not a probability in [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw NotStochastic("occupancy entries sum to " + std::to_string(sum) +
                          ", expected 1");
    }
  }

  static OccupancyDistribution checked(std::vector<double> probs) {
    OccupancyDistribution d{std::move(probs)};
    d.validate();
    return d;
  }

  /// Point mass on one state.
  static OccupancyDistribution point_mass(std::size_t states,
                                          std::size_t state) {
    OccupancyDistribution d{std::vector<double>(states, 0.0)};
    d.probs.at(state) = 1.0;
    return d;
  }

  friend bool operator==(const OccupancyDistribution&,
                         const OccupancyDistribution&) = default;
};

/// Pushes an occupancy distribution forward by `cycles` matrix
/// applications, one per elapsed cycle. cycles = 0 returns the input
/// unchanged.
inline OccupancyDistribution propagate_occupancy(
    const OccupancyDistribution& initial, const TransitionSchedule& schedule,
    std::size_t cycles) {
  initial.validate();
  if (initial.size() != schedule.states()) {
    throw BadDimension("occupancy length " + std::to_string(initial.size()) +
                       " vs schedule states " +
                       std::to_string(schedule.states()));
  }
  if (!schedule.covers(cycles)) {
    throw HorizonExceedsSchedule(
        "schedule of length " + std::to_string(schedule.matrices.size()) +
        " does not cover " + std::to_string(cycles) + " cycles");
  }
  std::vector<double> p = initial.probs;
  for (std::size_t z = 0; z < cycles; ++z) {
    p = left_multiply(p, schedule.matrix_for_cycle(z));
  }
  return OccupancyDistribution::checked(std::move(p));
}

}  // namespace cohortmn
