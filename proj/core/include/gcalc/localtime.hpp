#pragma once

#include <functional>
#include <vector>

#include "gcalc/expectation.hpp"
#include "gcalc/sampler.hpp"

namespace gcalc {

// sgn with sgn(0) = 0.
inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// The C^1 approximation of |x|: (eps + x^2/eps)/2 inside (-eps, eps).
double phi_eps(double x, double eps);
double phi_eps_prime(double x, double eps);    // x/eps inside, +-1 outside
double phi_eps_second(double x, double eps);   // 1/eps inside, 0 at and beyond +-eps

struct LocalTimeField {
  std::vector<double> levels;           // a_0 < ... < a_A
  TimeGrid grid;
  std::vector<std::vector<double>> values;  // values[j][k] = L^{a_j}_{t_k}
  double bandwidth = 0.0;
};

// Window estimator: L_k = (1/2eps) sum_{i<k} 1_(a-eps,a+eps)(B_{t_i}) dqv_i.
std::vector<double> window_local_time(const SamplePath& path, double a, double eps);

// Local time read off the Tanaka formula:
// L_k = |B_{t_k} - a| - |a| - sum_{i<k} sgn(B_{t_i} - a)(B_{t_{i+1}} - B_{t_i}).
std::vector<double> tanaka_local_time(const SamplePath& path, double a);

// sup_k |window - tanaka|.
double tanaka_residual(const SamplePath& path, double a, double eps);

struct DeltaBoundReport {
  std::vector<double> deltas;
  std::vector<double> estimates;  // sup-MC of int 1_[a,a+delta](B) d<B>
  std::vector<double> ratios;     // estimates[i] / estimates[i+1]
};

DeltaBoundReport delta_bound_check(const ControlFamily& family, double a,
                                   const std::vector<double>& deltas,
                                   std::size_t n_paths, const SeedSpec& seeds);

struct OccupationReport {
  double lhs = 0.0;  // int 1_(a,b)(B) d<B>
  double rhs = 0.0;  // sum_j L^{x_j} dx, bin-aligned histogram local times
  double diff = 0.0;
};

OccupationReport occupation_check(const SamplePath& path, double a, double b,
                                  std::size_t n_bins);

LocalTimeField local_time_field(const SamplePath& path,
                                const std::vector<double>& levels, double eps);

struct QvLocalTimeReport {
  double sum_sq = 0.0;  // sum over the dyadic partition of (dL)^2
  double target = 0.0;  // 4 int L^x dx (trapezoid over the field's levels)
  double ratio = 1.0;   // sum_sq / target; 1 when both vanish
};

// Dyadic partition a + i(b-a)/2^n over the field's level range; requires the
// field to contain those levels and a strictly positive sigma_lo regime.
QvLocalTimeReport qv_of_local_time(const LocalTimeField& field, std::size_t n,
                                   std::size_t t_index, const GParams& params);

// Convex function with its left derivative and curvature measure mu = f''.
// mu is a finite list of atoms plus an optional piecewise-constant density;
// density segment i covers [density_breaks[i], density_breaks[i+1]).
struct ConvexSpec {
  std::function<double(double)> f;
  std::function<double(double)> f_left;
  std::vector<std::pair<double, double>> atoms;  // (location, weight >= 0)
  std::vector<double> density_breaks;            // sorted, size m+1 (may be empty)
  std::vector<double> density_values;            // size m, each >= 0

  void validate() const;  // mass finite, consistency with f_left on a probe grid
};

// Convex Ito defect sequence
// f(B_k) - f(0) - int f'_-(B) dB - (1/2)[sum w L^a_k + int L^a_k density(a) da].
std::vector<double> convex_ito_defect(const ConvexSpec& spec,
                                      const SamplePath& path, double eps);

// sup_k |defect_k|.
double convex_ito_check(const ConvexSpec& spec, const SamplePath& path, double eps);

struct FubiniReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double diff = 0.0;
};

// Exchange of the level integral and the Ito sum for sgn(B - a) weighted by
// a compactly supported function; exact at the discrete level.
FubiniReport stochastic_fubini_check(const SamplePath& path,
                                     const std::function<double(double)>& weight,
                                     const std::vector<double>& levels);

// Log-log regression slope of mean max_t |L^{a+h} - L^a| against h over
// dyadic multiples of the field spacing, averaged across fields.
double holder_exponent(const std::vector<LocalTimeField>& fields,
                       std::size_t max_doublings);

}  // namespace gcalc
