#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gcalc/expectation.hpp"

using namespace gcalc;

namespace {

double plain_mean(const ControlPath& control, const PathFunctional& functional,
                  std::size_t n_paths, const SeedSpec& seeds) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    const auto noise = normal_stream(seeds.with_stream(seeds.stream_id + i),
                                     control.grid.n_steps);
    sum += functional(sample_path(control, noise));
  }
  return sum / static_cast<double>(n_paths);
}

}  // namespace

TEST_CASE("family always contains both constant extremes") {
  const ControlFamily family(make_grid(1.0, 16), GParams(0.4, 1.2), 4, 3);
  const auto controls = family.controls();
  bool has_lo = false, has_hi = false;
  for (const auto& c : controls) {
    bool all_lo = true, all_hi = true;
    for (double s : c.sigmas) {
      all_lo = all_lo && s == 0.4;
      all_hi = all_hi && s == 1.2;
    }
    has_lo = has_lo || all_lo;
    has_hi = has_hi || all_hi;
  }
  CHECK(has_lo);
  CHECK(has_hi);
  // 2^4 bang-bang plus one interior ladder rung (extremes deduped).
  CHECK(controls.size() == 17);
}

TEST_CASE("singleton family reduces to the plain Monte Carlo mean") {
  const auto grid = make_grid(1.0, 32);
  const GParams params(0.5, 1.0);
  const auto family = ControlFamily::singleton(grid, params, 1.0);
  auto terminal = [](const SamplePath& p) { return p.values.back(); };
  const SeedSpec seeds{5, 0};
  const auto report = sublinear_expectation(terminal, family, 500, seeds);
  const auto control = family.controls().front();
  CHECK(report.value == plain_mean(control, terminal, 500, seeds));
  CHECK(report.per_control_means.size() == 1);
}

TEST_CASE("classical band collapses every control to one") {
  const ControlFamily family(make_grid(1.0, 16), GParams(0.7, 0.7), 6, 5);
  CHECK(family.controls().size() == 1);
}

TEST_CASE("sublinear-expectation axioms hold exactly on fixed seeds") {
  const auto grid = make_grid(1.0, 32);
  const GParams params(0.5, 1.0);
  const ControlFamily family(grid, params, 3, 3);
  const SeedSpec seeds{11, 0};
  const std::size_t n_paths = 200;

  auto value_of = [&](const PathFunctional& f) {
    return sublinear_expectation(f, family, n_paths, seeds).value;
  };

  auto x = [](const SamplePath& p) { return std::abs(p.values.back()); };
  auto y = [](const SamplePath& p) { return p.values.back() * p.values.back(); };

  SUBCASE("monotonicity") {
    auto x_plus = [&](const SamplePath& p) { return x(p) + 0.25 * y(p); };
    CHECK(value_of(x) <= value_of(x_plus) + 1e-10);
  }
  SUBCASE("constants") {
    auto c = [](const SamplePath&) { return 2.75; };
    CHECK(value_of(c) == doctest::Approx(2.75).epsilon(1e-12));
  }
  SUBCASE("subadditivity") {
    auto xy = [&](const SamplePath& p) { return x(p) + y(p); };
    CHECK(value_of(xy) <= value_of(x) + value_of(y) + 1e-10);
  }
  SUBCASE("positive homogeneity") {
    for (double lambda : {0.0, 0.5, 3.0}) {
      auto lx = [&](const SamplePath& p) { return lambda * x(p); };
      CHECK(value_of(lx) ==
            doctest::Approx(lambda * value_of(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("enlarging the family never decreases the value") {
  const auto grid = make_grid(1.0, 16);
  const GParams params(0.5, 1.0);
  const SeedSpec seeds{23, 0};
  auto payoff = [](const SamplePath& p) {
    return std::abs(p.values[8]) - 0.5 * std::abs(p.values.back());
  };
  const double small =
      sublinear_expectation(payoff, ControlFamily(grid, params, 2, 2), 300, seeds).value;
  const double large =
      sublinear_expectation(payoff, ControlFamily(grid, params, 4, 5), 300, seeds).value;
  CHECK(large >= small);
}

TEST_CASE("ties break toward the smallest control signature") {
  const auto grid = make_grid(1.0, 8);
  const GParams params(0.5, 1.0);
  const ControlFamily family(grid, params, 2, 3);
  auto c = [](const SamplePath&) { return 1.0; };
  const auto report = sublinear_expectation(c, family, 100, {3, 0});
  // All means tie at 1.0; the winner is the all-sigma_lo constant control.
  for (double s : report.argmax_control.sigmas) {
    CHECK(s == 0.5);
  }
}

TEST_CASE("non-finite functional values are reported with context") {
  const auto grid = make_grid(1.0, 8);
  const ControlFamily family(grid, GParams(0.5, 1.0), 2, 2);
  auto bad = [](const SamplePath&) { return std::nan(""); };
  CHECK_THROWS_WITH_AS(sublinear_expectation(bad, family, 10, {1, 0}),
                       doctest::Contains("path"), std::runtime_error);
  CHECK_THROWS_AS(sublinear_expectation(bad, family, 1, {1, 0}),
                  std::invalid_argument);
}

TEST_CASE("bdg_check with zero integrand vanishes") {
  const ControlFamily family(make_grid(1.0, 16), GParams(0.5, 1.0), 2, 2);
  auto zeros = [](const SamplePath& p) {
    return std::vector<double>(p.grid.n_steps, 0.0);
  };
  const auto report = bdg_check(zeros, family, 1.0, 50, {7, 0});
  CHECK(report.lhs == 0.0);
  CHECK(report.mid == 0.0);
  CHECK(report.hi == 0.0);
  CHECK(report.lo == 0.0);
  CHECK(report.pathwise_ordered);
}

TEST_CASE("bdg_check classical case sits inside the Doob window") {
  const auto grid = make_grid(1.0, 512);
  const GParams params(1.0, 1.0);
  const ControlFamily family(grid, params, 2, 2);
  auto ones = [](const SamplePath& p) {
    return std::vector<double>(p.grid.n_steps, 1.0);
  };
  const auto report = bdg_check(ones, family, 1.0, 2000, {29, 0});
  CHECK(report.mid == doctest::Approx(1.0).epsilon(1e-12));  // <B>_1 = 1 exactly
  CHECK(report.lhs >= report.mid);
  CHECK(report.lhs <= 4.0 * report.mid);
  CHECK(report.pathwise_ordered);
  CHECK(std::abs(report.integral_mean) <= 3.0 * report.integral_se);
}
