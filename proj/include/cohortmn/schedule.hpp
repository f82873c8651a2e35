#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "cohortmn/errors.hpp"
#include "cohortmn/matrix.hpp"

namespace cohortmn {

/// Tolerance on |row sum - 1| for a row to count as stochastic.
inline constexpr double kRowSumTolerance = 1e-9;

/// Sentinel marking a diagonal entry to be completed from the row
/// residual. Only valid on the diagonal.
inline constexpr double kImpliedDiagonal =
    std::numeric_limits<double>::quiet_NaN();

/// Per-cycle row-stochastic transition matrices. A time-invariant model
/// is a schedule of length one with hold_last set.
struct TransitionSchedule {
  std::vector<Matrix> matrices;
  bool hold_last = true;

  std::size_t states() const {
    return matrices.empty() ? 0 : matrices.front().rows();
  }

  /// True when `cycles` matrix applications can be served.
  bool covers(std::size_t cycles) const {
    return hold_last ? !matrices.empty() : matrices.size() >= cycles;
  }

  /// Matrix applied when stepping from cycle `cycle` to `cycle + 1`
  /// (zero-based).
  const Matrix& matrix_for_cycle(std::size_t cycle) const {
    if (cycle < matrices.size()) return matrices[cycle];
    if (hold_last && !matrices.empty()) return matrices.back();
    throw HorizonExceedsSchedule(
        "schedule of length " + std::to_string(matrices.size()) +
        " cannot serve cycle " + std::to_string(cycle) +
        " without hold_last");
  }

  friend bool operator==(const TransitionSchedule&,
                         const TransitionSchedule&) = default;
};

struct ScheduleOptions {
  /// Opt-in repair: rows whose sum misses 1 beyond tolerance are scaled
  /// back to 1 and a warning is recorded. Off by default so modeling
  /// errors surface as hard failures.
  bool renormalize = false;
  /// Sink for renormalization warnings; may be null.
  std::vector<std::string>* warnings = nullptr;
};

namespace detail {

inline std::string entry_name(std::size_t matrix, std::size_t row,
                              std::size_t col) {
  return "matrix " + std::to_string(matrix + 1) + ", row " +
         std::to_string(row + 1) + ", column " + std::to_string(col + 1);
}

inline void warn(const ScheduleOptions& options, std::string message) {
  if (options.warnings) options.warnings->push_back(std::move(message));
}

}  // namespace detail

/// Completes implied diagonals (diagonal = 1 - off-diagonal row sum) and
/// verifies every row of every matrix is row-stochastic.
///
/// Throws BadDimension on shape mismatch, NegativeResidual when the
/// off-diagonal entries of an implied row exceed 1, and NotStochastic
/// when an entry is not a probability or an explicit row misses the
/// sum-to-one check. With options.renormalize, rows that fail only the
/// sum check are rescaled instead and a warning is recorded.
inline TransitionSchedule validate_schedule(std::vector<Matrix> raw,
                                            std::size_t states,
                                            bool hold_last = true,
                                            const ScheduleOptions& options = {}) {
  if (states == 0) throw BadDimension("state count must be at least 1");
  if (raw.empty()) throw BadDimension("schedule must contain at least one matrix");

  for (std::size_t m = 0; m < raw.size(); ++m) {
    Matrix& matrix = raw[m];
    if (matrix.rows() != states || matrix.cols() != states) {
      throw BadDimension("matrix " + std::to_string(m + 1) + " is " +
                         std::to_string(matrix.rows()) + "x" +
                         std::to_string(matrix.cols()) + ", expected " +
                         std::to_string(states) + "x" +
                         std::to_string(states));
    }
    for (std::size_t r = 0; r < states; ++r) {
      const bool implied = std::isnan(matrix(r, r));
      double off_sum = 0.0;
      for (std::size_t c = 0; c < states; ++c) {
        const double value = matrix(r, c);
        if (std::isnan(value)) {
          if (c != r) {
            throw NotStochastic("implied entries are only allowed on the "
                                "diagonal (" +
                                detail::entry_name(m, r, c) + ")");
          }
          continue;
        }
        if (!(value >= 0.0 && value <= 1.0)) {
          throw NotStochastic("entry " + std::to_string(value) + " at " +
                              detail::entry_name(m, r, c) +
                              " is not a probability in [0, 1]");
        }
        if (c != r) off_sum += value;
      }

      if (implied) {
        if (off_sum > 1.0 + kRowSumTolerance) {
          if (options.renormalize) {
            for (std::size_t c = 0; c < states; ++c) {
              matrix(r, c) = (c == r) ? 0.0 : matrix(r, c) / off_sum;
            }
            detail::warn(options, "renormalized row " + std::to_string(r + 1) +
                                      " of matrix " + std::to_string(m + 1) +
                                      " (off-diagonal sum " +
                                      std::to_string(off_sum) + ")");
            continue;
          }
          throw NegativeResidual(
              "off-diagonal entries of row " + std::to_string(r + 1) +
              " in matrix " + std::to_string(m + 1) + " sum to " +
              std::to_string(off_sum) + " > 1");
        }
        // Residual may round a hair past 1; clamp the diagonal at zero.
        matrix(r, r) = off_sum >= 1.0 ? 0.0 : 1.0 - off_sum;
      } else {
        const double row_sum = off_sum + matrix(r, r);
        if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
          if (options.renormalize && row_sum > 0.0) {
            for (std::size_t c = 0; c < states; ++c) matrix(r, c) /= row_sum;
            detail::warn(options, "renormalized row " + std::to_string(r + 1) +
                                      " of matrix " + std::to_string(m + 1) +
                                      " (sum " + std::to_string(row_sum) + ")");
            continue;
          }
          throw NotStochastic("row " + std::to_string(r + 1) + " of matrix " +
                              std::to_string(m + 1) + " sums to " +
                              std::to_string(row_sum) + ", expected 1");
        }
      }
    }

    // Completed rows must pass the stochastic check as well.
    for (std::size_t r = 0; r < states; ++r) {
      double row_sum = 0.0;
      for (std::size_t c = 0; c < states; ++c) row_sum += matrix(r, c);
      if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
        throw NotStochastic("row " + std::to_string(r + 1) + " of matrix " +
                            std::to_string(m + 1) +
                            " failed the stochastic check after completion");
      }
    }
  }

  TransitionSchedule schedule;
  schedule.matrices = std::move(raw);
  schedule.hold_last = hold_last;
  return schedule;
}

}  // namespace cohortmn
