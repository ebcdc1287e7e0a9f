#pragma once

#include <vector>

#include "gcalc/core.hpp"
#include "gcalc/sampler.hpp"

namespace gcalc::testutil {

// Constant-volatility path for a given seed/stream.
inline SamplePath classical_path(double sigma, double t_end, std::size_t n_steps,
                                 std::uint64_t seed, std::uint64_t stream = 0) {
  const auto grid = make_grid(t_end, n_steps);
  const GParams params(0.0, sigma > 0.0 ? sigma : 1.0);
  const ControlPath control(grid, std::vector<double>(n_steps, sigma), params);
  return sample_path(control, normal_stream(SeedSpec{seed, stream}, n_steps));
}

// The worked three-point path: dt = 1, sigma = (1, 2), xi = (1, -1),
// values (0, 1, -1), qv (0, 1, 5).
inline SamplePath three_point_path() {
  const auto grid = make_grid(2.0, 2);
  const GParams params(0.0, 2.0);
  const ControlPath control(grid, {1.0, 2.0}, params);
  return sample_path(control, std::vector<double>{1.0, -1.0});
}

}  // namespace gcalc::testutil
