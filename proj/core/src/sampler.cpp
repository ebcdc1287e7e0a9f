#include "gcalc/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace gcalc {

ControlPath::ControlPath(TimeGrid g, std::vector<double> s, const GParams& params)
    : grid(std::move(g)), sigmas(std::move(s)) {
  if (sigmas.size() != grid.n_steps) {
    throw std::invalid_argument("ControlPath: need one sigma per interval");
  }
  for (double sigma : sigmas) {
    if (!(sigma >= params.sigma_lo) || !(sigma <= params.sigma_hi)) {
      throw std::invalid_argument("ControlPath: sigma outside [sigma_lo, sigma_hi]");
    }
  }
}

SamplePath sample_path(const ControlPath& control, std::span<const double> noise) {
  const std::size_t n = control.grid.n_steps;
  if (noise.size() != n) {
    throw std::invalid_argument("sample_path: noise length must equal n_steps");
  }
  SamplePath path;
  path.grid = control.grid;
  path.values.resize(n + 1);
  path.qv.resize(n + 1);
  path.values[0] = 0.0;
  path.qv[0] = 0.0;
  const double dt = control.grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = control.sigmas[i];
    path.values[i + 1] = path.values[i] + sigma * sqrt_dt * noise[i];
    path.qv[i + 1] = path.qv[i] + sigma * sigma * dt;
  }
  return path;
}

std::vector<double> ito_sum(const SamplePath& path, std::span<const double> integrand) {
  const std::size_t n = path.grid.n_steps;
  if (integrand.size() != n) {
    throw std::invalid_argument("ito_sum: integrand length must equal n_steps");
  }
  std::vector<double> sums(n + 1);
  sums[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sums[i + 1] = sums[i] + integrand[i] * (path.values[i + 1] - path.values[i]);
  }
  return sums;
}

std::vector<double> qv_from_increments(const SamplePath& path) {
  const std::size_t n = path.grid.n_steps;
  std::vector<double> out(n + 1);
  out[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double db = path.values[i + 1] - path.values[i];
    out[i + 1] = out[i] + db * db;
  }
  return out;
}

}  // namespace gcalc
