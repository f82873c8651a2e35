#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cohortmn/errors.hpp"
#include "cohortmn/occupancy.hpp"
#include "cohortmn/schedule.hpp"
#include "cohortmn/state_space.hpp"

namespace cohortmn {

/// A realized per-state head count.
using CohortCount = std::vector<std::int64_t>;

/// Everything needed to run one closed-cohort model: who the states
/// are, how they transition, where the cohort starts, and for how long.
struct CohortSpec {
  StateSpace state_space;
  TransitionSchedule schedule;
  CohortCount initial_counts;
  std::int64_t population = 0;  // closed-cohort size
  std::size_t horizon = 0;      // number of cycles to run
  double cycle_length = 1.0;    // duration of one cycle, metadata only

  void validate() const {
    state_space.validate();
    const std::size_t s = state_space.size();
    if (schedule.states() != s) {
      throw BadDimension("schedule is " + std::to_string(schedule.states()) +
                         "-state, state space has " + std::to_string(s));
    }
    if (initial_counts.size() != s) {
      throw BadDimension("initial counts cover " +
                         std::to_string(initial_counts.size()) + " states, " +
                         "expected " + std::to_string(s));
    }
    std::int64_t total = 0;
    for (std::size_t k = 0; k < s; ++k) {
      if (initial_counts[k] < 0) {
        throw ValidationError("initial count for state '" +
                              state_space.labels[k] + "' is negative");
      }
      total += initial_counts[k];
    }
    if (population < 1) {
      throw ValidationError("cohort size must be at least 1");
    }
    if (total != population) {
      throw CountMismatch("initial counts sum to " + std::to_string(total) +
                          ", cohort size is " + std::to_string(population));
    }
    if (!schedule.covers(horizon)) {
      throw HorizonExceedsSchedule(
          "schedule of length " + std::to_string(schedule.matrices.size()) +
          " does not cover horizon " + std::to_string(horizon));
    }
    if (!(cycle_length > 0.0)) {
      throw ValidationError("cycle length must be positive");
    }
  }

  /// Initial occupancy distribution of one individual: counts / n0.
  OccupancyDistribution initial_occupancy() const {
    std::vector<double> p(initial_counts.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] = static_cast<double>(initial_counts[k]) /
             static_cast<double>(population);
    }
    return OccupancyDistribution{std::move(p)};
  }
};

}  // namespace cohortmn
