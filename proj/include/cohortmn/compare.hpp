#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "cohortmn/errors.hpp"
#include "cohortmn/microsim.hpp"
#include "cohortmn/moments.hpp"

namespace cohortmn {

struct CompareOptions {
  /// Bound on |z| for cells whose analytic variance reaches the floor.
  double z_threshold = 4.0;
  /// Acceptable empirical/analytic variance ratio band.
  double ratio_low = 0.85;
  double ratio_high = 1.15;
  /// Cells below this analytic variance (persons^2) are too close to
  /// degenerate for the bands to be meaningful; they are reported but
  /// not binding.
  double variance_floor = 100.0;
};

struct ComparisonCell {
  std::size_t cycle = 0;
  std::size_t state = 0;
  double analytic_mean = 0.0;
  double empirical_mean = 0.0;
  /// (empirical - analytic) / sqrt(analytic variance / replications);
  /// NaN for degenerate cells.
  double z = 0.0;
  double analytic_variance = 0.0;
  double empirical_variance = 0.0;
  /// empirical / analytic variance; NaN below the variance floor.
  double ratio = 0.0;
  /// Analytic variance is exactly zero: the empirical variance must be
  /// exactly zero too.
  bool degenerate = false;
  /// Thresholds apply to this cell.
  bool binding = false;
  bool pass = true;
};

struct ComparisonReport {
  std::vector<ComparisonCell> cells;
  CompareOptions options;
  std::size_t states = 0;

  double max_abs_z = 0.0;          // over binding cells
  double max_abs_z_all = 0.0;      // over every non-degenerate cell
  double ratio_min = std::numeric_limits<double>::quiet_NaN();
  double ratio_max = std::numeric_limits<double>::quiet_NaN();
  /// Fraction of non-degenerate cells with |z| <= z_threshold.
  double fraction_within = 1.0;
  bool pass = true;
};

/// Scores empirical moments against the exact trajectory cell by cell.
/// A cell passes when it is degenerate with zero empirical variance,
/// non-binding, or binding with |z| and the variance ratio inside the
/// configured bands. The report passes when every cell does.
inline ComparisonReport compare(const ReplicationSummary& summary,
                                const MomentTrajectory& trajectory,
                                const CompareOptions& options = {}) {
  const std::size_t cycles = trajectory.cycles();
  const std::size_t s = trajectory.states();
  if (summary.empirical_mean.rows() != cycles ||
      summary.empirical_mean.cols() != s) {
    throw DimensionMismatch(
        "summary is " + std::to_string(summary.empirical_mean.rows()) + "x" +
        std::to_string(summary.empirical_mean.cols()) + ", trajectory is " +
        std::to_string(cycles) + "x" + std::to_string(s));
  }
  if (summary.replications < 2) {
    throw InsufficientReplications("summary carries fewer than 2 replications");
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  ComparisonReport report;
  report.options = options;
  report.states = s;
  report.cells.reserve(cycles * s);

  const double r = static_cast<double>(summary.replications);
  std::size_t non_degenerate = 0;
  std::size_t within = 0;

  for (std::size_t z = 0; z < cycles; ++z) {
    for (std::size_t k = 0; k < s; ++k) {
      ComparisonCell cell;
      cell.cycle = z;
      cell.state = k;
      cell.analytic_mean = trajectory.means[z][k];
      cell.analytic_variance = trajectory.covariances[z](k, k);
      cell.empirical_mean = summary.empirical_mean(z, k);
      cell.empirical_variance = summary.empirical_variance(z, k);

      if (cell.analytic_variance <= 0.0) {
        cell.degenerate = true;
        cell.z = nan;
        cell.ratio = nan;
        cell.pass = cell.empirical_variance == 0.0 &&
                    cell.empirical_mean == cell.analytic_mean;
      } else {
        ++non_degenerate;
        cell.z = (cell.empirical_mean - cell.analytic_mean) /
                 std::sqrt(cell.analytic_variance / r);
        report.max_abs_z_all = std::max(report.max_abs_z_all,
                                        std::abs(cell.z));
        if (std::abs(cell.z) <= options.z_threshold) ++within;
        cell.binding = cell.analytic_variance >= options.variance_floor;
        if (cell.binding) {
          cell.ratio = cell.empirical_variance / cell.analytic_variance;
          cell.pass = std::abs(cell.z) <= options.z_threshold &&
                      cell.ratio >= options.ratio_low &&
                      cell.ratio <= options.ratio_high;
          report.max_abs_z = std::max(report.max_abs_z, std::abs(cell.z));
          if (std::isnan(report.ratio_min) || cell.ratio < report.ratio_min) {
            report.ratio_min = cell.ratio;
          }
          if (std::isnan(report.ratio_max) || cell.ratio > report.ratio_max) {
            report.ratio_max = cell.ratio;
          }
        } else {
          cell.ratio = nan;
        }
      }
      report.pass = report.pass && cell.pass;
      report.cells.push_back(cell);
    }
  }
  report.fraction_within =
      non_degenerate == 0
          ? 1.0
          : static_cast<double>(within) / static_cast<double>(non_degenerate);
  return report;
}

}  // namespace cohortmn
