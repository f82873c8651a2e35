#include <cmath>
#include <random>
#include <vector>

#include <catch_amalgamated.hpp>

#include "cohortmn/moments.hpp"
#include "oracles.hpp"

using namespace cohortmn;

TEST_CASE("log multinomial coefficient on hand-checked values") {
  const auto coefficient = [](std::vector<std::int64_t> counts) {
    return std::exp(
        log_multinomial_coefficient(std::span<const std::int64_t>(counts)));
  };
  CHECK(coefficient({2, 1}) == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(coefficient({2, 2}) == Catch::Approx(6.0).epsilon(1e-12));
  CHECK(coefficient({1, 1, 1}) == Catch::Approx(6.0).epsilon(1e-12));
  CHECK(coefficient({5, 0, 0}) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(coefficient({3, 2, 1}) == Catch::Approx(60.0).epsilon(1e-12));
}

TEST_CASE("individual pmf reads the occupied state's probability") {
  const OccupancyDistribution occupancy{{0.2, 0.3, 0.5}};
  const std::vector<int> second = {0, 1, 0};
  CHECK(individual_pmf(occupancy, second) == 0.3);

  const std::vector<int> none = {0, 0, 0};
  const std::vector<int> two = {1, 1, 0};
  const std::vector<int> bad_value = {0, 2, 0};
  const std::vector<int> short_vec = {1, 0};
  CHECK_THROWS_AS(individual_pmf(occupancy, none), BadIndicator);
  CHECK_THROWS_AS(individual_pmf(occupancy, two), BadIndicator);
  CHECK_THROWS_AS(individual_pmf(occupancy, bad_value), BadIndicator);
  CHECK_THROWS_AS(individual_pmf(occupancy, short_vec), BadIndicator);
}

TEST_CASE("reference model moments after one cycle") {
  const auto spec = oracles::reference_spec();
  const auto occupancy =
      propagate_occupancy(spec.initial_occupancy(), spec.schedule, 1);

  const auto mean = cohort_mean(spec.population, occupancy);
  CHECK(mean[0] == Catch::Approx(7100.0).margin(1e-9));
  CHECK(mean[1] == Catch::Approx(1000.0).margin(1e-9));
  CHECK(mean[2] == Catch::Approx(500.0).margin(1e-9));
  CHECK(mean[3] == Catch::Approx(1400.0).margin(1e-9));

  const auto cov = cohort_covariance(spec.population, occupancy);
  CHECK(cov(0, 0) == Catch::Approx(2059.0).margin(1e-9));
  CHECK(cov(1, 1) == Catch::Approx(900.0).margin(1e-9));
  CHECK(cov(2, 2) == Catch::Approx(475.0).margin(1e-9));
  CHECK(cov(3, 3) == Catch::Approx(1204.0).margin(1e-9));
  CHECK(cov(0, 1) == Catch::Approx(-710.0).margin(1e-9));
  CHECK(cov(1, 0) == Catch::Approx(-710.0).margin(1e-9));
}

TEST_CASE("cohort covariance is exactly population times individual") {
  std::mt19937_64 rng(99482);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t s = 2 + static_cast<std::size_t>(rng() % 5);
    const OccupancyDistribution occupancy{oracles::random_simplex(rng, s)};
    const std::int64_t n0 =
        1 + static_cast<std::int64_t>(rng() % 1000000);
    const auto individual = individual_covariance(occupancy);
    const auto cohort = cohort_covariance(n0, occupancy);
    for (std::size_t k = 0; k < s; ++k) {
      for (std::size_t l = 0; l < s; ++l) {
        // Bitwise equality: the cohort entry is the same multiplication.
        CHECK(cohort(k, l) == static_cast<double>(n0) * individual(k, l));
      }
    }
  }
}

TEST_CASE("log pmf agrees with brute-force assignment enumeration") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t s = 2 + static_cast<std::size_t>(rng() % 3);
    const std::int64_t n0 = 1 + static_cast<std::int64_t>(rng() % 5);
    const OccupancyDistribution occupancy{oracles::random_simplex(rng, s)};
    oracles::for_each_composition(
        n0, s, [&](const std::vector<std::int64_t>& counts) {
          const double expected = oracles::assignment_pmf(occupancy.probs, counts);
          const double got = std::exp(cohort_log_pmf(n0, occupancy, counts));
          CHECK(got == Catch::Approx(expected).margin(1e-12));
        });
  }
}

TEST_CASE("log pmf agrees with exact factorials for small cohorts") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t s = 2 + static_cast<std::size_t>(rng() % 3);
    const std::int64_t n0 = 1 + static_cast<std::int64_t>(rng() % 6);
    const OccupancyDistribution occupancy{oracles::random_simplex(rng, s)};
    oracles::for_each_composition(
        n0, s, [&](const std::vector<std::int64_t>& counts) {
          const double expected = oracles::factorial_pmf(n0, occupancy.probs, counts);
          const double got = std::exp(cohort_log_pmf(n0, occupancy, counts));
          CHECK(got == Catch::Approx(expected).epsilon(1e-12));
        });
  }
}

TEST_CASE("pmf handles zero-probability states") {
  const OccupancyDistribution occupancy{{0.5, 0.5, 0.0}};
  const CohortCount occupied_zero = {1, 1, 1};
  CHECK(cohort_log_pmf(3, occupancy, occupied_zero) ==
        -std::numeric_limits<double>::infinity());

  const CohortCount avoids_zero = {2, 1, 0};
  CHECK(std::exp(cohort_log_pmf(3, occupancy, avoids_zero)) ==
        Catch::Approx(3.0 * 0.25 * 0.5).epsilon(1e-12));

  const OccupancyDistribution point{{1.0, 0.0}};
  const CohortCount all_first = {4, 0};
  CHECK(cohort_log_pmf(4, point, all_first) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pmf rejects inconsistent count vectors") {
  const OccupancyDistribution occupancy{{0.5, 0.5}};
  const CohortCount wrong_total = {1, 1};
  CHECK_THROWS_AS(cohort_log_pmf(3, occupancy, wrong_total), CountMismatch);
  const CohortCount negative = {4, -1};
  CHECK_THROWS_AS(cohort_log_pmf(3, occupancy, negative), ValidationError);
  const CohortCount short_vec = {3};
  CHECK_THROWS_AS(cohort_log_pmf(3, occupancy, short_vec), BadDimension);
}

TEST_CASE("enumerated moments from the pmf match the closed forms") {
  std::mt19937_64 rng(246801);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t s = 2 + static_cast<std::size_t>(rng() % 3);
    const std::int64_t n0 = 2 + static_cast<std::int64_t>(rng() % 5);
    const OccupancyDistribution occupancy{oracles::random_simplex(rng, s)};

    std::vector<double> mean(s, 0.0);
    Matrix second_moment(s, s, 0.0);
    double mass = 0.0;
    oracles::for_each_composition(
        n0, s, [&](const std::vector<std::int64_t>& counts) {
          const double w = std::exp(cohort_log_pmf(n0, occupancy, counts));
          mass += w;
          for (std::size_t k = 0; k < s; ++k) {
            mean[k] += w * static_cast<double>(counts[k]);
            for (std::size_t l = 0; l < s; ++l) {
              second_moment(k, l) += w * static_cast<double>(counts[k]) *
                                     static_cast<double>(counts[l]);
            }
          }
        });

    CHECK(mass == Catch::Approx(1.0).margin(1e-13));
    const auto closed_mean = cohort_mean(n0, occupancy);
    const auto closed_cov = cohort_covariance(n0, occupancy);
    for (std::size_t k = 0; k < s; ++k) {
      CHECK(mean[k] == Catch::Approx(closed_mean[k]).margin(1e-10));
      for (std::size_t l = 0; l < s; ++l) {
        const double cov = second_moment(k, l) - mean[k] * mean[l];
        CHECK(cov == Catch::Approx(closed_cov(k, l)).margin(1e-10));
      }
    }
  }
}

TEST_CASE("covariance rows sum to zero and the matrix is PSD") {
  std::mt19937_64 rng(1029384756);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t s = 2 + static_cast<std::size_t>(rng() % 5);
    const OccupancyDistribution occupancy{oracles::random_simplex(rng, s)};
    const std::int64_t n0 = 1 + static_cast<std::int64_t>(rng() % 1000000);
    const auto cov = cohort_covariance(n0, occupancy);
    const double scale = static_cast<double>(n0);
    for (std::size_t k = 0; k < s; ++k) {
      double row_sum = 0.0;
      for (std::size_t l = 0; l < s; ++l) {
        row_sum += cov(k, l);
        CHECK(cov(k, l) == cov(l, k));
      }
      CHECK(std::abs(row_sum) <= 1e-12 * scale);
    }
    CHECK(oracles::min_eigenvalue(cov) >= -1e-9 * scale);
  }
}

TEST_CASE("moment trajectory matches per-cycle closed forms") {
  const auto spec = oracles::reference_spec(5000, 12);
  const auto trajectory = moment_trajectory(spec);
  REQUIRE(trajectory.cycles() == 13);
  REQUIRE(trajectory.states() == 4);

  for (std::size_t z = 0; z <= 12; ++z) {
    const auto occupancy =
        propagate_occupancy(spec.initial_occupancy(), spec.schedule, z);
    const auto mean = cohort_mean(spec.population, occupancy);
    const auto cov = cohort_covariance(spec.population, occupancy);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(trajectory.means[z][k] == Catch::Approx(mean[k]).margin(1e-10));
      for (std::size_t l = 0; l < 4; ++l) {
        CHECK(trajectory.covariances[z](k, l) ==
              Catch::Approx(cov(k, l)).margin(1e-10));
      }
    }
  }

  // Cycle zero is the deterministic split of the initial cohort.
  CHECK(trajectory.means[0][0] == 5000.0);
  CHECK(trajectory.covariances[0](0, 0) == 0.0);
}
