#include "gcalc/gheat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gcalc {

SpaceGrid::SpaceGrid(double lo, double hi, std::size_t cells)
    : x_lo(lo), x_hi(hi), n_cells(cells) {
  if (!(lo < hi) || cells < 1) {
    throw std::invalid_argument("SpaceGrid: need x_lo < x_hi and n_cells >= 1");
  }
}

SpaceGrid default_space_grid(double t, const GParams& params, double dx_target) {
  const double half_width = std::max(8.0 * params.sigma_hi * std::sqrt(std::max(t, 1e-12)), 1.0);
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half_width / dx_target));
  return SpaceGrid(-half_width, half_width, std::max<std::size_t>(cells, 2));
}

double PdeSolution::at(double x) const {
  const double dx = grid.dx();
  if (x <= grid.x_lo) {
    return values.front();
  }
  if (x >= grid.x_hi) {
    return values.back();
  }
  const double pos = (x - grid.x_lo) / dx;
  const auto j = std::min(static_cast<std::size_t>(pos), grid.n_cells - 1);
  const double w = pos - static_cast<double>(j);
  return (1.0 - w) * values[j] + w * values[j + 1];
}

PdeSolution solve_gheat(const std::function<double(double)>& phi, double t,
                        const GParams& params, const SpaceGrid& grid) {
  if (t < 0.0) {
    throw std::invalid_argument("solve_gheat: negative horizon");
  }
  PdeSolution sol{grid, t, {}, 0.0, 0};
  const std::size_t nodes = grid.n_nodes();
  sol.values.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double v = phi(grid.node(j));
    if (!std::isfinite(v)) {
      throw std::invalid_argument("solve_gheat: non-finite initial datum");
    }
    sol.values[j] = v;
  }
  if (t == 0.0) {
    return sol;
  }

  const double dx = grid.dx();
  const double dx2 = dx * dx;
  const double cfl_dt = dx2 / (params.sigma_hi * params.sigma_hi);
  const auto steps = static_cast<std::size_t>(std::ceil(t / cfl_dt));
  const double dt = t / static_cast<double>(steps);
  sol.dt_used = dt;
  sol.steps = steps;

  std::vector<double> next(nodes);
  for (std::size_t step = 0; step < steps; ++step) {
    // Zero curvature at the boundary nodes: they do not move.
    next.front() = sol.values.front();
    next.back() = sol.values.back();
    for (std::size_t j = 1; j + 1 < nodes; ++j) {
      const double curv =
          (sol.values[j + 1] - 2.0 * sol.values[j] + sol.values[j - 1]) / dx2;
      next[j] = sol.values[j] + dt * g_function(curv, params);
    }
    sol.values.swap(next);
  }
  return sol;
}

double gnormal_expectation(const std::function<double(double)>& phi, double t,
                           const GParams& params, const SpaceGrid& grid) {
  if (!(grid.x_lo <= 0.0 && 0.0 <= grid.x_hi)) {
    throw std::invalid_argument("gnormal_expectation: grid must contain x = 0");
  }
  return solve_gheat(phi, t, params, grid).at(0.0);
}

}  // namespace gcalc
