#include <cmath>

#include <catch_amalgamated.hpp>

#include "cohortmn/compare.hpp"
#include "cohortmn/microsim.hpp"
#include "cohortmn/moments.hpp"
#include "oracles.hpp"

using namespace cohortmn;

TEST_CASE("matching engines pass the default bands") {
  // The default variance-ratio band is about 3.4 standard errors wide
  // at 1000 replications; fewer replications would make it a coin flip.
  const auto spec = oracles::reference_spec(2000, 20);
  const auto summary = replicate(spec, 1000, 8675309);
  const auto trajectory = moment_trajectory(spec);

  const ComparisonReport report = compare(summary, trajectory);
  CHECK(report.pass);
  CHECK(report.cells.size() == 21 * 4);
  CHECK(report.max_abs_z <= 4.0);
  CHECK(report.fraction_within >= 0.99);

  // Cycle zero of a point-mass start is deterministic in both engines.
  for (std::size_t k = 0; k < 4; ++k) {
    const ComparisonCell& cell = report.cells[k];
    CHECK(cell.cycle == 0);
    CHECK(cell.degenerate);
    CHECK(cell.pass);
  }
}

TEST_CASE("a perturbed analytic matrix is detected") {
  const auto sim_spec = oracles::reference_spec(10000, 10);

  // Analytic engine believes S1 -> S2 is 0.15 instead of 0.10.
  Matrix wrong(4, 4, 0.0);
  wrong(0, 0) = 0.66; wrong(0, 1) = 0.15; wrong(0, 2) = 0.05; wrong(0, 3) = 0.14;
  wrong(1, 1) = 0.76; wrong(1, 2) = 0.07; wrong(1, 3) = 0.17;
  wrong(2, 2) = 0.89; wrong(2, 3) = 0.11;
  wrong(3, 3) = 1.0;
  CohortSpec analytic = sim_spec;
  analytic.schedule = validate_schedule({wrong}, 4);

  const auto summary = replicate(sim_spec, 200, 13);
  const auto trajectory = moment_trajectory(analytic);
  const ComparisonReport report = compare(summary, trajectory);
  CHECK_FALSE(report.pass);
  CHECK(report.max_abs_z > 10.0);
}

TEST_CASE("degenerate identity model passes with zero z everywhere") {
  CohortSpec spec;
  spec.state_space = StateSpace::numbered(3);
  spec.schedule = validate_schedule({Matrix::identity(3)}, 3);
  spec.initial_counts = {4, 0, 6};
  spec.population = 10;
  spec.horizon = 5;

  const auto summary = replicate(spec, 2, 1);
  const auto trajectory = moment_trajectory(spec);
  const ComparisonReport report = compare(summary, trajectory);
  CHECK(report.pass);
  CHECK(report.max_abs_z == 0.0);
  CHECK(report.max_abs_z_all == 0.0);
  for (const ComparisonCell& cell : report.cells) {
    CHECK(cell.pass);
    // Only the empty state has occupancy pinned at zero; the others
    // keep a positive analytic variance under the iid reading.
    CHECK(cell.degenerate == (cell.state == 1));
  }
}

TEST_CASE("small cohorts never produce binding cells") {
  const auto spec = oracles::reference_spec(50, 8);
  const auto summary = replicate(spec, 40, 5);
  const auto trajectory = moment_trajectory(spec);
  const ComparisonReport report = compare(summary, trajectory);
  for (const ComparisonCell& cell : report.cells) {
    CHECK_FALSE(cell.binding);  // max variance 50/4 < floor of 100
  }
}

TEST_CASE("custom bands tighten or loosen the verdict") {
  const auto spec = oracles::reference_spec(5000, 10);
  const auto summary = replicate(spec, 200, 99);
  const auto trajectory = moment_trajectory(spec);

  CompareOptions absurd;
  absurd.z_threshold = 1e-6;
  absurd.ratio_low = 0.999999;
  absurd.ratio_high = 1.000001;
  CHECK_FALSE(compare(summary, trajectory, absurd).pass);

  CompareOptions loose;
  loose.z_threshold = 50.0;
  loose.ratio_low = 0.01;
  loose.ratio_high = 100.0;
  CHECK(compare(summary, trajectory, loose).pass);
}

TEST_CASE("shape disagreements are dimension mismatches") {
  const auto spec = oracles::reference_spec(100, 5);
  const auto summary = replicate(spec, 10, 3);

  const auto longer = oracles::reference_spec(100, 6);
  CHECK_THROWS_AS(compare(summary, moment_trajectory(longer)),
                  DimensionMismatch);
}

TEST_CASE("z-scores follow their definition") {
  const auto spec = oracles::reference_spec(3000, 4);
  const auto summary = replicate(spec, 150, 424242);
  const auto trajectory = moment_trajectory(spec);
  const ComparisonReport report = compare(summary, trajectory);

  for (const ComparisonCell& cell : report.cells) {
    if (cell.degenerate) continue;
    const double se =
        std::sqrt(cell.analytic_variance / static_cast<double>(150));
    const double expected = (cell.empirical_mean - cell.analytic_mean) / se;
    CHECK(cell.z == Catch::Approx(expected).margin(1e-12));
    CHECK(cell.ratio ==
          Catch::Approx(cell.empirical_variance / cell.analytic_variance)
              .margin(1e-12));
  }
}
