#include "gcalc/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gcalc {

double phi_eps(double x, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("phi_eps: eps must be positive");
  }
  const double ax = std::abs(x);
  if (ax < eps) {
    return 0.5 * (eps + x * x / eps);
  }
  return ax;
}

double phi_eps_prime(double x, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("phi_eps_prime: eps must be positive");
  }
  if (x > eps) {
    return 1.0;
  }
  if (x < -eps) {
    return -1.0;
  }
  return x / eps;
}

double phi_eps_second(double x, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("phi_eps_second: eps must be positive");
  }
  // Zero at |x| = eps by convention.
  return std::abs(x) < eps ? 1.0 / eps : 0.0;
}

std::vector<double> window_local_time(const SamplePath& path, double a, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("window_local_time: eps must be positive");
  }
  const std::size_t n = path.grid.n_steps;
  std::vector<double> out(n + 1);
  out[0] = 0.0;
  const double scale = 1.0 / (2.0 * eps);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = path.values[i];
    const double hit =
        (b > a - eps && b < a + eps) ? (path.qv[i + 1] - path.qv[i]) : 0.0;
    out[i + 1] = out[i] + scale * hit;
  }
  return out;
}

std::vector<double> tanaka_local_time(const SamplePath& path, double a) {
  const std::size_t n = path.grid.n_steps;
  std::vector<double> out(n + 1);
  const double abs_a = std::abs(a);
  double ito = 0.0;
  out[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    ito += sgn(path.values[k - 1] - a) * (path.values[k] - path.values[k - 1]);
    out[k] = (std::abs(path.values[k] - a) - abs_a) - ito;
  }
  return out;
}

double tanaka_residual(const SamplePath& path, double a, double eps) {
  const auto window = window_local_time(path, a, eps);
  const auto tanaka = tanaka_local_time(path, a);
  double sup = 0.0;
  for (std::size_t k = 0; k < window.size(); ++k) {
    sup = std::max(sup, std::abs(window[k] - tanaka[k]));
  }
  return sup;
}

DeltaBoundReport delta_bound_check(const ControlFamily& family, double a,
                                   const std::vector<double>& deltas,
                                   std::size_t n_paths, const SeedSpec& seeds) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] < deltas[i - 1]))) {
      throw std::invalid_argument("delta_bound_check: deltas must be positive and decreasing");
    }
  }
  DeltaBoundReport report;
  report.deltas = deltas;
  for (double delta : deltas) {
    auto functional = [a, delta](const SamplePath& path) {
      double occ = 0.0;
      for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
        const double b = path.values[i];
        if (b >= a && b <= a + delta) {
          occ += path.qv[i + 1] - path.qv[i];
        }
      }
      return occ;
    };
    report.estimates.push_back(
        sublinear_expectation(functional, family, n_paths, seeds).value);
  }
  for (std::size_t i = 0; i + 1 < report.estimates.size(); ++i) {
    const double num = report.estimates[i];
    const double den = report.estimates[i + 1];
    report.ratios.push_back(den != 0.0 ? num / den : (num == 0.0 ? 1.0 : HUGE_VAL));
  }
  return report;
}

OccupationReport occupation_check(const SamplePath& path, double a, double b,
                                  std::size_t n_bins) {
  if (!(a < b) || n_bins < 1) {
    throw std::invalid_argument("occupation_check: need a < b and n_bins >= 1");
  }
  const double dx = (b - a) / static_cast<double>(n_bins);
  std::vector<double> bin_occ(n_bins, 0.0);
  OccupationReport report;
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
    const double x = path.values[i];
    if (x > a && x < b) {
      const double dqv = path.qv[i + 1] - path.qv[i];
      report.lhs += dqv;
      auto j = static_cast<std::size_t>((x - a) / dx);
      j = std::min(j, n_bins - 1);
      bin_occ[j] += dqv;
    }
  }
  // rhs = sum_j L^{x_j} dx with L^{x_j} = bin_occ[j] / dx, so the identity is
  // algebraic up to rounding of the division/multiplication round trip.
  for (double occ : bin_occ) {
    report.rhs += (occ / dx) * dx;
  }
  report.diff = report.lhs - report.rhs;
  return report;
}

LocalTimeField local_time_field(const SamplePath& path,
                                const std::vector<double>& levels, double eps) {
  if (!std::is_sorted(levels.begin(), levels.end())) {
    throw std::invalid_argument("local_time_field: levels must be sorted");
  }
  LocalTimeField field;
  field.levels = levels;
  field.grid = path.grid;
  field.bandwidth = eps;
  field.values.reserve(levels.size());
  for (double a : levels) {
    field.values.push_back(window_local_time(path, a, eps));
  }
  return field;
}

QvLocalTimeReport qv_of_local_time(const LocalTimeField& field, std::size_t n,
                                   std::size_t t_index, const GParams& params) {
  if (!(params.sigma_lo > 0.0)) {
    throw std::invalid_argument(
        "qv_of_local_time: the quadratic variation of local time requires sigma_lo > 0");
  }
  if (field.levels.size() < 2 || t_index >= field.grid.n_steps + 1) {
    throw std::invalid_argument("qv_of_local_time: bad field or t_index");
  }
  const double a = field.levels.front();
  const double b = field.levels.back();
  const auto pieces = std::size_t{1} << n;
  const double tol = 1e-9 * (1.0 + std::abs(b - a));

  // Locate the dyadic partition a + i(b-a)/2^n inside the field's levels.
  std::vector<std::size_t> idx(pieces + 1);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i <= pieces; ++i) {
    const double target =
        a + (b - a) * static_cast<double>(i) / static_cast<double>(pieces);
    while (cursor < field.levels.size() &&
           field.levels[cursor] < target - tol) {
      ++cursor;
    }
    if (cursor >= field.levels.size() ||
        std::abs(field.levels[cursor] - target) > tol) {
      throw std::invalid_argument(
          "qv_of_local_time: field levels do not contain the dyadic partition");
    }
    idx[i] = cursor;
  }

  QvLocalTimeReport report;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double dl =
        field.values[idx[i + 1]][t_index] - field.values[idx[i]][t_index];
    report.sum_sq += dl * dl;
  }
  double integral = 0.0;
  for (std::size_t j = 0; j + 1 < field.levels.size(); ++j) {
    integral += 0.5 *
                (field.values[j][t_index] + field.values[j + 1][t_index]) *
                (field.levels[j + 1] - field.levels[j]);
  }
  report.target = 4.0 * integral;
  report.ratio = report.target != 0.0
                     ? report.sum_sq / report.target
                     : (report.sum_sq == 0.0 ? 1.0 : HUGE_VAL);
  return report;
}

void ConvexSpec::validate() const {
  if (!f || !f_left) {
    throw std::invalid_argument("ConvexSpec: f and f_left are required");
  }
  for (const auto& [loc, w] : atoms) {
    if (!(w >= 0.0) || !std::isfinite(loc)) {
      throw std::invalid_argument("ConvexSpec: atom weights must be finite and >= 0");
    }
  }
  if (!density_breaks.empty()) {
    if (density_breaks.size() != density_values.size() + 1 ||
        !std::is_sorted(density_breaks.begin(), density_breaks.end())) {
      throw std::invalid_argument("ConvexSpec: malformed density");
    }
    for (double v : density_values) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument("ConvexSpec: density must be non-negative");
      }
    }
  }

  // Probe mu[p_i, p_{i+1}) against f_left increments at midpoints between
  // the measure's critical points.
  std::set<double> critical;
  for (const auto& [loc, w] : atoms) {
    critical.insert(loc);
  }
  for (double x : density_breaks) {
    critical.insert(x);
  }
  if (critical.empty()) {
    critical.insert(0.0);
  }
  const double span =
      std::max(1.0, *critical.rbegin() - *critical.begin());
  std::vector<double> probes;
  probes.push_back(*critical.begin() - 0.5 * span);
  for (auto it = critical.begin(); it != critical.end(); ++it) {
    auto next = std::next(it);
    if (next != critical.end()) {
      probes.push_back(0.5 * (*it + *next));
    }
  }
  probes.push_back(*critical.rbegin() + 0.5 * span);

  auto mu_interval = [&](double lo, double hi) {
    double mass = 0.0;
    for (const auto& [loc, w] : atoms) {
      if (loc >= lo && loc < hi) {
        mass += w;
      }
    }
    for (std::size_t i = 0; i + 1 < density_breaks.size(); ++i) {
      const double seg_lo = std::max(lo, density_breaks[i]);
      const double seg_hi = std::min(hi, density_breaks[i + 1]);
      if (seg_hi > seg_lo) {
        mass += density_values[i] * (seg_hi - seg_lo);
      }
    }
    return mass;
  };

  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    const double jump = f_left(probes[i + 1]) - f_left(probes[i]);
    const double mass = mu_interval(probes[i], probes[i + 1]);
    if (std::abs(jump - mass) > 1e-8 * (1.0 + std::abs(mass))) {
      throw std::invalid_argument(
          "ConvexSpec: f_left increments inconsistent with the curvature measure");
    }
  }
}

std::vector<double> convex_ito_defect(const ConvexSpec& spec,
                                      const SamplePath& path, double eps) {
  spec.validate();
  if (!(eps > 0.0)) {
    throw std::invalid_argument("convex_ito_defect: eps must be positive");
  }
  const std::size_t n = path.grid.n_steps;

  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    integrand[i] = spec.f_left(path.values[i]);
  }
  const auto ito = ito_sum(path, integrand);

  // Local-time term (1/2) int L^a f''(da), split into atoms and density.
  std::vector<double> lt(n + 1, 0.0);
  for (const auto& [loc, w] : spec.atoms) {
    const auto l = window_local_time(path, loc, eps);
    for (std::size_t k = 0; k <= n; ++k) {
      lt[k] += w * l[k];
    }
  }
  if (!spec.density_breaks.empty()) {
    // Trapezoid in the level variable, 32 sub-intervals per density segment.
    constexpr std::size_t kSub = 32;
    for (std::size_t seg = 0; seg + 1 < spec.density_breaks.size(); ++seg) {
      const double lo = spec.density_breaks[seg];
      const double hi = spec.density_breaks[seg + 1];
      const double rho = spec.density_values[seg];
      if (rho == 0.0 || !(hi > lo)) {
        continue;
      }
      const double da = (hi - lo) / static_cast<double>(kSub);
      for (std::size_t s = 0; s <= kSub; ++s) {
        const double a = lo + da * static_cast<double>(s);
        const double trap_w = (s == 0 || s == kSub) ? 0.5 : 1.0;
        const auto l = window_local_time(path, a, eps);
        for (std::size_t k = 0; k <= n; ++k) {
          lt[k] += trap_w * rho * da * l[k];
        }
      }
    }
  }

  const double f0 = spec.f(0.0);
  std::vector<double> defect(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    defect[k] = ((spec.f(path.values[k]) - f0) - ito[k]) - 0.5 * lt[k];
  }
  return defect;
}

double convex_ito_check(const ConvexSpec& spec, const SamplePath& path, double eps) {
  const auto defect = convex_ito_defect(spec, path, eps);
  double sup = 0.0;
  for (double d : defect) {
    sup = std::max(sup, std::abs(d));
  }
  return sup;
}

FubiniReport stochastic_fubini_check(const SamplePath& path,
                                     const std::function<double(double)>& weight,
                                     const std::vector<double>& levels) {
  const std::size_t n = path.grid.n_steps;
  FubiniReport report;

  // lhs: level-integral of weight(a) * terminal Ito sum of sgn(B - a).
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    auto terminal = [&](double a) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += sgn(path.values[i] - a) * (path.values[i + 1] - path.values[i]);
      }
      return weight(a) * s;
    };
    report.lhs += 0.5 * (terminal(levels[j]) + terminal(levels[j + 1])) *
                  (levels[j + 1] - levels[j]);
  }

  // rhs: Ito sum of the per-step level integral.
  double rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double zeta = 0.0;
    for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
      const double ga = weight(levels[j]) * sgn(path.values[i] - levels[j]);
      const double gb = weight(levels[j + 1]) * sgn(path.values[i] - levels[j + 1]);
      zeta += 0.5 * (ga + gb) * (levels[j + 1] - levels[j]);
    }
    rhs += zeta * (path.values[i + 1] - path.values[i]);
  }
  report.rhs = rhs;
  report.diff = report.lhs - report.rhs;
  return report;
}

double holder_exponent(const std::vector<LocalTimeField>& fields,
                       std::size_t max_doublings) {
  if (fields.empty()) {
    throw std::invalid_argument("holder_exponent: need at least one field");
  }
  const auto& levels = fields.front().levels;
  if (levels.size() < 3) {
    throw std::invalid_argument("holder_exponent: need at least 3 levels");
  }
  const double da = levels[1] - levels[0];

  std::vector<double> log_h;
  std::vector<double> log_d;
  for (std::size_t j = 0; j <= max_doublings; ++j) {
    const std::size_t lag = std::size_t{1} << j;
    if (lag >= levels.size()) {
      break;
    }
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& field : fields) {
      for (std::size_t i = 0; i + lag < field.levels.size(); ++i) {
        double sup = 0.0;
        const auto& lo = field.values[i];
        const auto& hi = field.values[i + lag];
        for (std::size_t k = 0; k < lo.size(); ++k) {
          sup = std::max(sup, std::abs(hi[k] - lo[k]));
        }
        total += sup;
        ++count;
      }
    }
    const double mean = total / static_cast<double>(count);
    if (mean > 0.0) {
      log_h.push_back(std::log(da * static_cast<double>(lag)));
      log_d.push_back(std::log(mean));
    }
  }
  if (log_h.size() < 2) {
    throw std::runtime_error("holder_exponent: degenerate field, no spread in increments");
  }

  // Least-squares slope of log D against log h.
  const auto m = static_cast<double>(log_h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    sx += log_h[i];
    sy += log_d[i];
    sxx += log_h[i] * log_h[i];
    sxy += log_h[i] * log_d[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace gcalc
