#pragma once

#include <span>
#include <vector>

#include "gcalc/core.hpp"

namespace gcalc {

// Piecewise-constant volatility control: one sigma per grid interval.
// Identifies a single measure in the volatility-control family.
struct ControlPath {
  TimeGrid grid;
  std::vector<double> sigmas;  // size n_steps, each in [sigma_lo, sigma_hi]

  ControlPath() = default;
  ControlPath(TimeGrid g, std::vector<double> s, const GParams& params);
};

// Discrete path of B with its quadratic variation carried two ways:
// qv is the analytic accumulator sum sigma^2 dt.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;  // B_{t_0..t_N}, values[0] = 0
  std::vector<double> qv;      // <B>_{t_0..t_N}, qv[0] = 0, non-decreasing
};

// Euler path under the control: B_{i+1} = B_i + sigma_i sqrt(dt) xi_i.
SamplePath sample_path(const ControlPath& control, std::span<const double> noise);

// Left-endpoint Ito partial sums S_k = sum_{i<k} eta_i (B_{i+1} - B_i).
std::vector<double> ito_sum(const SamplePath& path, std::span<const double> integrand);

// Running sum of squared increments (realized variance estimate of <B>).
std::vector<double> qv_from_increments(const SamplePath& path);

}  // namespace gcalc
