// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gcalc/experiments.hpp"
#include "gcalc/expectation.hpp"
#include "gcalc/gheat.hpp"
#include "gcalc/localtime.hpp"
#include "gcalc/parallel.hpp"
#include "gcalc/sampler.hpp"

using namespace gcalc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, bool> run_as_map(const ExperimentConfig& cfg) {
  const auto report = run_experiment(cfg);
  std::map<std::string, bool> out;
  for (const auto& [name, ok] : report.assertions) {
    out[name] = ok;
  }
  return out;
}

ExperimentConfig base_config(const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.out_dir = "acceptance_out";
  cfg.seed = 2026;
  return cfg;
}

bool criterion_gheat_quadratics() {
  const GParams params(0.5, 1.0);
  const auto grid = default_space_grid(1.0, params, 0.05);
  const double u_pos = gnormal_expectation([](double x) { return x * x; }, 1.0,
                                           params, grid);
  const double u_neg = gnormal_expectation([](double x) { return -x * x; }, 1.0,
                                           params, grid);
  return std::abs(u_pos - 1.0) <= 1e-6 && std::abs(u_neg + 0.25) <= 1e-6;
}

bool criterion_pde_mc_agreement() {
  auto cfg = base_config("gheat-oracle");
  cfg.n_steps = std::size_t{1} << 12;
  cfg.n_paths = 10'000;
  cfg.blocks = 6;
  cfg.ladder = 5;
  const auto ok = run_as_map(cfg);
  return ok.at("pde_abs") && ok.at("pde_neg_abs") && ok.at("mc_abs") &&
         ok.at("mc_neg_abs");
}

bool criterion_ito_identity() {
  const std::size_t n = std::size_t{1} << 12;
  const std::size_t n_paths = 1000;
  const TimeGrid grid = make_grid(1.0, n);
  const ControlPath control(grid, std::vector<double>(n, 1.0), GParams(1.0, 1.0));
  std::vector<char> ok(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t i) {
    const auto path = sample_path(control, normal_stream({2026, i}, n));
    std::vector<double> integrand(path.values.begin(), path.values.end() - 1);
    const double ito = ito_sum(path, integrand).back();
    const double sq = qv_from_increments(path).back();
    const double bt2 = path.values.back() * path.values.back();
    ok[i] = std::abs(bt2 - 2.0 * ito - sq) <= 1e-10 * (1.0 + bt2) ? 1 : 0;
  });
  for (char c : ok) {
    if (!c) {
      return false;
    }
  }
  return true;
}

bool criterion_tanaka() {
  auto cfg = base_config("tanaka");
  cfg.sigma_lo = 1.0;
  cfg.sigma_hi = 1.0;
  cfg.n_steps = std::size_t{1} << 14;  // runner also checks 2^10 and 2^12
  cfg.n_paths = 1000;
  const auto ok = run_as_map(cfg);
  return ok.at("residual_decreasing") && ok.at("residual_final") &&
         ok.at("mean_l0");
}

bool criterion_delta_slope() {
  auto cfg = base_config("delta-bound");
  cfg.n_steps = std::size_t{1} << 12;
  cfg.n_paths = 1000;
  const auto ok = run_as_map(cfg);
  return ok.at("monotone_in_delta") && ok.at("ratios_in_window");
}

bool criterion_occupation() {
  auto cfg = base_config("occupation");
  cfg.sigma_lo = 1.0;
  cfg.sigma_hi = 1.0;
  cfg.n_steps = std::size_t{1} << 12;
  cfg.n_paths = 1000;
  const auto ok = run_as_map(cfg);
  return ok.at("identity_exact") && ok.at("classical_oracle");
}

bool criterion_qv_localtime() {
  auto cfg = base_config("qv-localtime");
  cfg.sigma_lo = 1.0;
  cfg.sigma_hi = 1.0;
  cfg.n_steps = std::size_t{1} << 16;
  cfg.n_paths = 200;
  const auto ok = run_as_map(cfg);

  bool refused = false;
  auto degenerate = cfg;
  degenerate.sigma_lo = 0.0;
  try {
    run_experiment(degenerate);
  } catch (const std::exception& e) {
    refused = std::string(e.what()).find("sigma_lo > 0") != std::string::npos;
  }
  return ok.at("ratio_in_window") && ok.at("gap_decreasing") && refused;
}

bool criterion_convex_ito() {
  auto cfg = base_config("convex-ito");
  cfg.n_steps = std::size_t{1} << 14;
  cfg.n_paths = 1000;
  const auto ok = run_as_map(cfg);
  return ok.at("affine_zero") && ok.at("abs_equals_tanaka") &&
         ok.at("call_half_tanaka") && ok.at("piecewise_residual");
}

bool criterion_axioms() {
  const TimeGrid grid = make_grid(1.0, 64);
  const GParams params(0.5, 1.0);
  const ControlFamily family(grid, params, 3, 3);
  const std::size_t n_paths = 200;

  auto value_of = [&](const PathFunctional& f) {
    return sublinear_expectation(f, family, n_paths, {2026, 0}).value;
  };

  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto c = normal_stream({777, trial}, 6);
    auto x = [&](const SamplePath& p) {
      return c[0] * std::abs(p.values[32]) + c[1] * p.values.back() * p.values.back();
    };
    auto y = [&](const SamplePath& p) {
      return c[2] * p.values.back() + c[3] * std::abs(p.values[16]);
    };
    const double ex = value_of(x);
    const double ey = value_of(y);

    auto xy = [&](const SamplePath& p) { return x(p) + y(p); };
    if (value_of(xy) > ex + ey + 1e-10 * (1.0 + std::abs(ex) + std::abs(ey))) {
      return false;
    }

    auto above = [&](const SamplePath& p) {
      return x(p) + std::abs(c[4]) * std::abs(p.values.back());
    };
    if (ex > value_of(above) + 1e-10 * (1.0 + std::abs(ex))) {
      return false;
    }

    const double lambda = std::abs(c[5]);
    auto lx = [&](const SamplePath& p) { return lambda * x(p); };
    if (std::abs(value_of(lx) - lambda * ex) >
        1e-10 * (1.0 + std::abs(lambda * ex))) {
      return false;
    }

    const double constant = c[0];
    auto k = [&](const SamplePath&) { return constant; };
    if (std::abs(value_of(k) - constant) > 1e-10 * (1.0 + std::abs(constant))) {
      return false;
    }
  }

  // Singleton family reduces to the plain mean with the same summation order.
  const auto singleton = ControlFamily::singleton(grid, params, 1.0);
  auto terminal = [](const SamplePath& p) { return p.values.back(); };
  const auto report = sublinear_expectation(terminal, singleton, n_paths, {2026, 0});
  const auto control = singleton.controls().front();
  double sum = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    sum += sample_path(control, normal_stream({2026, i}, 64)).values.back();
  }
  return report.value == sum / static_cast<double>(n_paths);
}

bool criterion_bdg() {
  const TimeGrid grid = make_grid(1.0, 512);
  const ControlFamily family(grid, GParams(1.0, 1.0), 2, 2);
  auto ones = [](const SamplePath& p) {
    return std::vector<double>(p.grid.n_steps, 1.0);
  };
  const auto report = bdg_check(ones, family, 1.0, 2000, {2026, 0});
  const double ratio = report.lhs / report.mid;
  return ratio >= 1.0 && ratio <= 4.0 && report.pathwise_ordered &&
         std::abs(report.integral_mean) <= 3.0 * report.integral_se;
}

bool criterion_holder() {
  auto cfg = base_config("holder-field");
  cfg.sigma_lo = 1.0;
  cfg.sigma_hi = 1.0;
  cfg.n_steps = std::size_t{1} << 14;
  cfg.n_paths = 100;
  return run_as_map(cfg).at("exponent_lower_bound");
}

bool criterion_reproducibility() {
  auto cfg = base_config("tanaka");
  cfg.n_steps = 256;
  cfg.n_paths = 50;

  cfg.out_dir = "acceptance_out/rep_a";
  const auto a = run_experiment(cfg);
  cfg.out_dir = "acceptance_out/rep_b";
  const auto b = run_experiment(cfg);

  setenv("G_CALC_THREADS", "1", 1);
  cfg.out_dir = "acceptance_out/rep_t1";
  const auto t1 = run_experiment(cfg);
  setenv("G_CALC_THREADS", "3", 1);
  cfg.out_dir = "acceptance_out/rep_t3";
  const auto t3 = run_experiment(cfg);
  unsetenv("G_CALC_THREADS");

  const std::string bytes = slurp(a.outputs[0]);
  return !bytes.empty() && bytes == slurp(b.outputs[0]) &&
         bytes == slurp(t1.outputs[0]) && bytes == slurp(t3.outputs[0]);
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    std::function<bool()> check;
  };
  const std::vector<Criterion> criteria = {
      {"gheat-quadratics", criterion_gheat_quadratics},
      {"pde-mc-agreement", criterion_pde_mc_agreement},
      {"ito-identity", criterion_ito_identity},
      {"tanaka-formula", criterion_tanaka},
      {"delta-slope", criterion_delta_slope},
      {"occupation-formula", criterion_occupation},
      {"qv-local-time", criterion_qv_localtime},
      {"convex-ito", criterion_convex_ito},
      {"expectation-axioms", criterion_axioms},
      {"bdg-interval", criterion_bdg},
      {"holder-diagnostic", criterion_holder},
      {"reproducibility", criterion_reproducibility},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string error;
    try {
      ok = criteria[i].check();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("criterion %02zu %-20s %s (%.1fs)%s%s\n", i + 1,
                criteria[i].label, ok ? "PASS" : "FAIL", secs,
                error.empty() ? "" : " error: ", error.c_str());
    std::fflush(stdout);
    all = all && ok;
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
