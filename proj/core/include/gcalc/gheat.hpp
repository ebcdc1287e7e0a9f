#pragma once

#include <functional>
#include <vector>

#include "gcalc/core.hpp"

namespace gcalc {

struct SpaceGrid {
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t n_cells = 0;

  SpaceGrid(double lo, double hi, std::size_t cells);

  double dx() const { return (x_hi - x_lo) / static_cast<double>(n_cells); }
  double node(std::size_t j) const { return x_lo + dx() * static_cast<double>(j); }
  std::size_t n_nodes() const { return n_cells + 1; }
};

// Default truncation at +-8 sigma_hi sqrt(T): Gaussian tails make the
// truncation error negligible against the scheme's own bias.
SpaceGrid default_space_grid(double t, const GParams& params, double dx_target);

struct PdeSolution {
  SpaceGrid grid;
  double t_end = 0.0;
  std::vector<double> values;  // u(t_end, x_j)
  double dt_used = 0.0;
  std::size_t steps = 0;

  // u(t_end, x) by linear interpolation between the two nearest nodes.
  double at(double x) const;
};

// Explicit monotone Euler scheme for d_t u = G(d_xx u), u(0,.) = phi.
// Boundary nodes use zero curvature (linear extrapolation outside the domain).
PdeSolution solve_gheat(const std::function<double(double)>& phi, double t,
                        const GParams& params, const SpaceGrid& grid);

// E[phi(sqrt(t) xi)] for xi G-normal, i.e. u(t, 0).
double gnormal_expectation(const std::function<double(double)>& phi, double t,
                           const GParams& params, const SpaceGrid& grid);

}  // namespace gcalc
