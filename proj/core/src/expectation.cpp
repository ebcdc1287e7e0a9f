#include "gcalc/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gcalc/parallel.hpp"

namespace gcalc {

ControlFamily::ControlFamily(TimeGrid g, GParams p, std::size_t blocks,
                             std::size_t ladder)
    : grid(std::move(g)), params(p), block_count(blocks), ladder_size(ladder) {
  if (block_count < 1 || block_count > 20) {
    throw std::invalid_argument("ControlFamily: block_count out of range");
  }
  if (ladder_size < 2) {
    throw std::invalid_argument("ControlFamily: ladder_size must be >= 2");
  }
}

ControlFamily::ControlFamily(TimeGrid g, GParams p, std::vector<double> fixed)
    : grid(std::move(g)), params(p), fixed_sigmas_(std::move(fixed)) {}

ControlFamily ControlFamily::singleton(TimeGrid g, GParams p, double sigma) {
  return ControlFamily(std::move(g), p, std::vector<double>{sigma});
}

std::vector<ControlPath> ControlFamily::controls() const {
  const std::size_t n = grid.n_steps;
  std::vector<std::vector<double>> signatures;

  if (!fixed_sigmas_.empty()) {
    for (double sigma : fixed_sigmas_) {
      signatures.emplace_back(n, sigma);
    }
  } else {
    // Bang-bang controls on block_count coarse blocks.
    const std::size_t blocks = std::min(block_count, n);
    for (std::size_t mask = 0; mask < (std::size_t{1} << blocks); ++mask) {
      std::vector<double> sig(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t b = i * blocks / n;
        sig[i] = (mask >> b) & 1 ? params.sigma_hi : params.sigma_lo;
      }
      signatures.push_back(std::move(sig));
    }
    // Constant controls on the value ladder (contains both extremes).
    for (std::size_t j = 0; j < ladder_size; ++j) {
      const double w = static_cast<double>(j) / static_cast<double>(ladder_size - 1);
      signatures.emplace_back(n, params.sigma_lo + w * (params.sigma_hi - params.sigma_lo));
    }
  }

  std::sort(signatures.begin(), signatures.end());
  signatures.erase(std::unique(signatures.begin(), signatures.end()),
                   signatures.end());

  std::vector<ControlPath> out;
  out.reserve(signatures.size());
  for (auto& sig : signatures) {
    out.emplace_back(grid, std::move(sig), params);
  }
  return out;
}

std::string control_signature(const ControlPath& control) {
  std::string sig;
  // Compressed run-length form, enough to identify the control in messages.
  double prev = control.sigmas.empty() ? 0.0 : control.sigmas.front();
  std::size_t run = 0;
  auto flush = [&] {
    if (run > 0) {
      if (!sig.empty()) {
        sig += ',';
      }
      sig += std::to_string(prev) + "x" + std::to_string(run);
    }
  };
  for (double s : control.sigmas) {
    if (s == prev) {
      ++run;
    } else {
      flush();
      prev = s;
      run = 1;
    }
  }
  flush();
  return sig;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

EstimateReport sublinear_expectation(const PathFunctional& functional,
                                     const ControlFamily& family,
                                     std::size_t n_paths, const SeedSpec& seeds) {
  if (n_paths < 2) {
    throw std::invalid_argument("sublinear_expectation: need n_paths >= 2");
  }
  const auto controls = family.controls();
  const std::size_t n_controls = controls.size();

  // samples[c][i]: functional value for control c on the noise of path i.
  std::vector<std::vector<double>> samples(n_controls,
                                           std::vector<double>(n_paths));
  parallel_for(n_paths, [&](std::size_t i) {
    const auto noise = normal_stream(seeds.with_stream(seeds.stream_id + i),
                                     family.grid.n_steps);
    for (std::size_t c = 0; c < n_controls; ++c) {
      const double v = functional(sample_path(controls[c], noise));
      if (!std::isfinite(v)) {
        throw std::runtime_error("sublinear_expectation: non-finite functional value, control " +
                                 control_signature(controls[c]) + ", path " +
                                 std::to_string(i));
      }
      samples[c][i] = v;
    }
  });

  EstimateReport report;
  report.n_paths = n_paths;
  report.per_control_means.resize(n_controls);
  std::size_t best = 0;
  for (std::size_t c = 0; c < n_controls; ++c) {
    report.per_control_means[c] = mean_and_se(samples[c]).mean;
    // Controls are in signature order; strict > keeps the smallest-signature
    // argmax on ties.
    if (c > 0 && report.per_control_means[c] > report.per_control_means[best]) {
      best = c;
    }
  }
  report.value = report.per_control_means[best];
  report.argmax_control = controls[best];
  report.std_error = mean_and_se(samples[best]).se;
  return report;
}

BdgReport bdg_check(const StepIntegrand& integrand, const ControlFamily& family,
                    double p, std::size_t n_paths, const SeedSpec& seeds) {
  if (p < 1.0) {
    throw std::invalid_argument("bdg_check: need p >= 1");
  }
  if (n_paths < 2) {
    throw std::invalid_argument("bdg_check: need n_paths >= 2");
  }
  const auto controls = family.controls();
  const std::size_t n_controls = controls.size();
  const std::size_t n = family.grid.n_steps;
  const double dt = family.grid.dt();
  const double lo2 = family.params.sigma_lo * family.params.sigma_lo;
  const double hi2 = family.params.sigma_hi * family.params.sigma_hi;

  struct PathStats {
    double sup_pow, mid_pow, base_pow, integral;
    bool ordered;
  };
  std::vector<std::vector<PathStats>> stats(n_controls,
                                            std::vector<PathStats>(n_paths));
  parallel_for(n_paths, [&](std::size_t i) {
    const auto noise = normal_stream(seeds.with_stream(seeds.stream_id + i), n);
    for (std::size_t c = 0; c < n_controls; ++c) {
      const auto path = sample_path(controls[c], noise);
      const auto eta = integrand(path);
      if (eta.size() != n) {
        throw std::invalid_argument("bdg_check: integrand must produce one value per interval");
      }
      double run = 0.0;
      double sup_abs = 0.0;
      double mid_sum = 0.0;
      double base_sum = 0.0;
      // lo/hi accumulated termwise the same way as mid, so the pathwise
      // ordering lo <= mid <= hi survives floating rounding.
      double lo_sum = 0.0;
      double hi_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e2 = eta[k] * eta[k];
        run += eta[k] * (path.values[k + 1] - path.values[k]);
        sup_abs = std::max(sup_abs, std::abs(run));
        const double s = controls[c].sigmas[k];
        mid_sum += e2 * (s * s * dt);
        lo_sum += e2 * (lo2 * dt);
        hi_sum += e2 * (hi2 * dt);
        base_sum += e2 * dt;
      }
      if (!std::isfinite(run) || !std::isfinite(mid_sum)) {
        throw std::runtime_error("bdg_check: non-finite moment, control " +
                                 control_signature(controls[c]) + ", path " +
                                 std::to_string(i));
      }
      stats[c][i] = {std::pow(sup_abs, 2.0 * p), std::pow(mid_sum, p),
                     std::pow(base_sum, p), run,
                     lo_sum <= mid_sum && mid_sum <= hi_sum};
    }
  });

  BdgReport report;
  std::size_t best_integral = 0;
  std::vector<double> column(n_paths);
  auto mean_of = [&](std::size_t c, auto member) {
    for (std::size_t i = 0; i < n_paths; ++i) {
      column[i] = stats[c][i].*member;
    }
    return mean_and_se(column).mean;
  };
  for (std::size_t c = 0; c < n_controls; ++c) {
    const double lhs_mean = mean_of(c, &PathStats::sup_pow);
    const double mid_mean = mean_of(c, &PathStats::mid_pow);
    const double base_mean = mean_of(c, &PathStats::base_pow);
    const double int_mean = mean_of(c, &PathStats::integral);
    if (c == 0) {
      report.lhs = lhs_mean;
      report.mid = mid_mean;
      report.hi = std::pow(hi2, p) * base_mean;
      report.lo = std::pow(lo2, p) * base_mean;
      report.integral_mean = int_mean;
    } else {
      report.lhs = std::max(report.lhs, lhs_mean);
      report.mid = std::max(report.mid, mid_mean);
      report.hi = std::max(report.hi, std::pow(hi2, p) * base_mean);
      report.lo = std::max(report.lo, std::pow(lo2, p) * base_mean);
      if (int_mean > report.integral_mean) {
        report.integral_mean = int_mean;
        best_integral = c;
      }
    }
    for (std::size_t i = 0; i < n_paths; ++i) {
      report.pathwise_ordered = report.pathwise_ordered && stats[c][i].ordered;
    }
  }
  for (std::size_t i = 0; i < n_paths; ++i) {
    column[i] = stats[best_integral][i].integral;
  }
  report.integral_se = mean_and_se(column).se;
  return report;
}

}  // namespace gcalc
