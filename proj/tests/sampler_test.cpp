#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gcalc/sampler.hpp"
#include "test_util.hpp"

using namespace gcalc;

TEST_CASE("zero control freezes values and qv") {
  const auto grid = make_grid(1.0, 8);
  const GParams params(0.0, 1.0);
  const ControlPath control(grid, std::vector<double>(8, 0.0), params);
  const auto path = sample_path(control, normal_stream({1, 0}, 8));
  for (double v : path.values) {
    CHECK(v == 0.0);
  }
  for (double q : path.qv) {
    CHECK(q == 0.0);
  }
}

TEST_CASE("worked two-step path") {
  const auto path = testutil::three_point_path();
  CHECK(path.values == std::vector<double>{0.0, 1.0, -1.0});
  CHECK(path.qv == std::vector<double>{0.0, 1.0, 5.0});
}

TEST_CASE("noise length mismatch is rejected") {
  const auto grid = make_grid(1.0, 4);
  const GParams params(0.0, 1.0);
  const ControlPath control(grid, std::vector<double>(4, 1.0), params);
  CHECK_THROWS_AS(sample_path(control, std::vector<double>(3, 0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ControlPath(grid, std::vector<double>(4, 2.0), params),
                  std::invalid_argument);
}

TEST_CASE("ito_sum telescopes for unit integrand") {
  const auto path = testutil::classical_path(1.0, 1.0, 256, 3);
  const auto sums = ito_sum(path, std::vector<double>(256, 1.0));
  for (std::size_t k = 0; k <= 256; ++k) {
    CHECK(sums[k] == doctest::Approx(path.values[k]).epsilon(1e-12));
  }
  CHECK(ito_sum(path, std::vector<double>(256, 0.0)).back() == 0.0);
  CHECK_THROWS_AS(ito_sum(path, std::vector<double>(255, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("ito_sum worked example") {
  const auto path = testutil::three_point_path();
  const auto sums = ito_sum(path, std::vector<double>{path.values[0], path.values[1]});
  CHECK(sums[2] == -2.0);
}

TEST_CASE("squared increments satisfy the discrete Ito identity") {
  const auto path = testutil::three_point_path();
  const auto rv = qv_from_increments(path);
  CHECK(rv[2] == 5.0);
  const auto sums = ito_sum(path, std::vector<double>{path.values[0], path.values[1]});
  CHECK(path.values[2] * path.values[2] - 2.0 * sums[2] == 5.0);

  // Property over sampled paths: B_k^2 - 2 int B dB = sum (dB)^2 to 1e-10.
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = testutil::classical_path(1.0, 1.0, 512, 99, s);
    std::vector<double> integrand(p.values.begin(), p.values.end() - 1);
    const auto ito = ito_sum(p, integrand);
    const auto sq = qv_from_increments(p);
    for (std::size_t k = 0; k <= 512; ++k) {
      const double lhs = p.values[k] * p.values[k] - 2.0 * ito[k];
      CHECK(std::abs(lhs - sq[k]) <= 1e-10 * (1.0 + std::abs(sq[k])));
    }
  }
}

TEST_CASE("qv sequences are non-decreasing") {
  const auto p = testutil::classical_path(1.3, 2.0, 300, 5);
  const auto sq = qv_from_increments(p);
  for (std::size_t k = 0; k + 1 <= 300; ++k) {
    CHECK(p.qv[k + 1] >= p.qv[k]);
    CHECK(sq[k + 1] >= sq[k]);
  }
}

TEST_CASE("terminal variance of B_1 matches sigma^2") {
  const std::size_t n_paths = 10'000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_paths; ++i) {
    const auto p = testutil::classical_path(1.0, 1.0, 64, 7, i);
    sum += p.values.back();
    sum_sq += p.values.back() * p.values.back();
  }
  const double mean = sum / n_paths;
  const double var = sum_sq / n_paths - mean * mean;
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("realized variance of one long path approaches sigma^2 t") {
  const auto p = testutil::classical_path(1.0, 1.0, 10'000, 11);
  CHECK(std::abs(qv_from_increments(p).back() - 1.0) < 0.1);
}

TEST_CASE("analytic and realized qv agree in expectation") {
  const std::size_t n_paths = 1000;
  std::vector<double> diffs(n_paths);
  for (std::uint64_t i = 0; i < n_paths; ++i) {
    const auto p = testutil::classical_path(1.0, 1.0, 256, 13, i);
    diffs[i] = qv_from_increments(p).back() - p.qv.back();
  }
  double mean = 0.0;
  for (double d : diffs) {
    mean += d;
  }
  mean /= static_cast<double>(n_paths);
  double ss = 0.0;
  for (double d : diffs) {
    ss += (d - mean) * (d - mean);
  }
  const double se = std::sqrt(ss / (n_paths - 1.0) / n_paths);
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("zero control on a sub-interval freezes the path there") {
  const auto grid = make_grid(1.0, 8);
  const GParams params(0.0, 1.0);
  std::vector<double> sigmas(8, 1.0);
  sigmas[3] = sigmas[4] = 0.0;
  const ControlPath control(grid, sigmas, params);
  const auto path = sample_path(control, normal_stream({17, 0}, 8));
  CHECK(path.values[4] == path.values[3]);
  CHECK(path.values[5] == path.values[4]);
  CHECK(path.qv[5] == path.qv[3]);
}
