#include "gcalc/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gcalc {

GParams::GParams(double lo, double hi) : sigma_lo(lo), sigma_hi(hi) {
  if (!(lo >= 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("GParams: need 0 <= sigma_lo <= sigma_hi");
  }
  if (!(hi > 0.0)) {
    throw std::invalid_argument("GParams: degenerate band sigma_lo = sigma_hi = 0");
  }
}

double g_function(double alpha, const GParams& params) {
  const double pos = alpha > 0.0 ? alpha : 0.0;
  const double neg = alpha < 0.0 ? -alpha : 0.0;
  return 0.5 * (params.sigma_hi * params.sigma_hi * pos -
                params.sigma_lo * params.sigma_lo * neg);
}

TimeGrid make_grid(double t_end, std::size_t n_steps) {
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("make_grid: t_end must be positive");
  }
  if (n_steps < 1) {
    throw std::invalid_argument("make_grid: n_steps must be at least 1");
  }
  TimeGrid grid;
  grid.t_end = t_end;
  grid.n_steps = n_steps;
  grid.times.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    grid.times[i] = t_end * static_cast<double>(i) / static_cast<double>(n_steps);
  }
  grid.times.front() = 0.0;
  grid.times.back() = t_end;
  return grid;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

NormalSource::NormalSource(const SeedSpec& spec) {
  // xoshiro256++ state derived from (seed, stream_id) via splitmix64.
  std::uint64_t s = spec.seed ^ (spec.stream_id * 0xd2b74407b1ce6e93ULL + 1);
  for (auto& word : state_) {
    word = splitmix64(s);
  }
}

std::uint64_t NormalSource::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double NormalSource::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Box-Muller on two uniforms; u1 shifted into (0,1] so log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

void NormalSource::fill(std::vector<double>& out, std::size_t count) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = next();
  }
}

std::vector<double> normal_stream(const SeedSpec& spec, std::size_t count) {
  NormalSource source(spec);
  std::vector<double> out;
  source.fill(out, count);
  return out;
}

}  // namespace gcalc
