#include <catch_amalgamated.hpp>

#include "cohortmn/schedule.hpp"

using namespace cohortmn;

namespace {

Matrix implied_row_matrix() {
  Matrix m(2, 2, 0.0);
  m(0, 0) = kImpliedDiagonal;
  m(0, 1) = 0.3;
  m(1, 0) = 0.1;
  m(1, 1) = kImpliedDiagonal;
  return m;
}

}  // namespace

TEST_CASE("implied diagonals complete to the row residual") {
  const TransitionSchedule schedule =
      validate_schedule({implied_row_matrix()}, 2);
  CHECK(schedule.matrices[0](0, 0) == Catch::Approx(0.7).margin(1e-15));
  CHECK(schedule.matrices[0](1, 1) == Catch::Approx(0.9).margin(1e-15));
}

TEST_CASE("explicit stochastic rows pass unchanged") {
  Matrix m(2, 2);
  m(0, 0) = 0.25; m(0, 1) = 0.75;
  m(1, 0) = 0.0;  m(1, 1) = 1.0;
  const TransitionSchedule schedule = validate_schedule({m}, 2);
  CHECK(schedule.matrices[0] == m);
}

TEST_CASE("off-diagonal mass above one is a negative residual") {
  Matrix m(2, 2, 0.0);
  m(0, 0) = kImpliedDiagonal;
  m(0, 1) = 1.2;
  m(1, 1) = 1.0;
  CHECK_THROWS_AS(validate_schedule({m}, 2), NotStochastic);

  Matrix ok_entries(3, 3, 0.0);
  ok_entries(0, 0) = kImpliedDiagonal;
  ok_entries(0, 1) = 0.6;
  ok_entries(0, 2) = 0.6;
  ok_entries(1, 1) = 1.0;
  ok_entries(2, 2) = 1.0;
  CHECK_THROWS_AS(validate_schedule({ok_entries}, 3), NegativeResidual);
}

TEST_CASE("explicit rows missing the sum check are rejected") {
  Matrix m(2, 2);
  m(0, 0) = 0.5; m(0, 1) = 0.499;
  m(1, 0) = 0.0; m(1, 1) = 1.0;
  CHECK_THROWS_AS(validate_schedule({m}, 2), NotStochastic);
}

TEST_CASE("row sums within tolerance are accepted") {
  Matrix m(2, 2);
  m(0, 0) = 0.5; m(0, 1) = 0.5 + 5e-10;
  m(1, 0) = 0.0; m(1, 1) = 1.0;
  CHECK_NOTHROW(validate_schedule({m}, 2));
}

TEST_CASE("entries outside [0, 1] are rejected even with renormalize") {
  Matrix m(2, 2);
  m(0, 0) = 1.5; m(0, 1) = -0.5;
  m(1, 0) = 0.0; m(1, 1) = 1.0;
  ScheduleOptions options;
  options.renormalize = true;
  CHECK_THROWS_AS(validate_schedule({m}, 2, true, options), NotStochastic);
}

TEST_CASE("renormalize rescales drifted rows and records a warning") {
  Matrix m(2, 2);
  m(0, 0) = 0.5; m(0, 1) = 0.49;
  m(1, 0) = 0.0; m(1, 1) = 1.0;
  ScheduleOptions options;
  options.renormalize = true;
  std::vector<std::string> warnings;
  options.warnings = &warnings;
  const TransitionSchedule schedule =
      validate_schedule({m}, 2, true, options);
  CHECK(schedule.matrices[0](0, 0) + schedule.matrices[0](0, 1) ==
        Catch::Approx(1.0).margin(1e-12));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("row 1") != std::string::npos);
}

TEST_CASE("renormalize also repairs overfull implied rows") {
  Matrix m(3, 3, 0.0);
  m(0, 0) = kImpliedDiagonal;
  m(0, 1) = 0.6;
  m(0, 2) = 0.5;
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  ScheduleOptions options;
  options.renormalize = true;
  std::vector<std::string> warnings;
  options.warnings = &warnings;
  const TransitionSchedule schedule =
      validate_schedule({m}, 3, true, options);
  CHECK(schedule.matrices[0](0, 0) == 0.0);
  CHECK(schedule.matrices[0](0, 1) == Catch::Approx(0.6 / 1.1).margin(1e-12));
  CHECK(schedule.matrices[0](0, 2) == Catch::Approx(0.5 / 1.1).margin(1e-12));
  CHECK(warnings.size() == 1);
}

TEST_CASE("shape mismatches are dimension errors") {
  CHECK_THROWS_AS(validate_schedule({Matrix(2, 3, 0.0)}, 2), BadDimension);
  CHECK_THROWS_AS(validate_schedule({Matrix(2, 2, 0.5)}, 3), BadDimension);
  CHECK_THROWS_AS(validate_schedule({}, 2), BadDimension);
}

TEST_CASE("implied entries off the diagonal are rejected") {
  Matrix m(2, 2);
  m(0, 0) = 0.5; m(0, 1) = kImpliedDiagonal;
  m(1, 0) = 0.0; m(1, 1) = 1.0;
  CHECK_THROWS_AS(validate_schedule({m}, 2), NotStochastic);
}

TEST_CASE("hold_last serves cycles beyond the listed matrices") {
  Matrix a = Matrix::identity(2);
  Matrix b(2, 2);
  b(0, 0) = 0.5; b(0, 1) = 0.5;
  b(1, 0) = 0.5; b(1, 1) = 0.5;
  const TransitionSchedule schedule = validate_schedule({a, b}, 2, true);
  CHECK(&schedule.matrix_for_cycle(0) == &schedule.matrices[0]);
  CHECK(&schedule.matrix_for_cycle(1) == &schedule.matrices[1]);
  CHECK(&schedule.matrix_for_cycle(7) == &schedule.matrices[1]);
  CHECK(schedule.covers(100));
}

TEST_CASE("without hold_last the horizon is capped") {
  const TransitionSchedule schedule =
      validate_schedule({Matrix::identity(2)}, 2, false);
  CHECK(schedule.covers(1));
  CHECK_FALSE(schedule.covers(2));
  CHECK_THROWS_AS(schedule.matrix_for_cycle(1), HorizonExceedsSchedule);
}
