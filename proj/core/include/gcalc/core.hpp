#pragma once

#include <cstdint>
#include <vector>

namespace gcalc {

// Volatility band [sigma_lo, sigma_hi] defining the sublinear generator G.
struct GParams {
  double sigma_lo = 0.0;
  double sigma_hi = 1.0;

  GParams(double lo, double hi);

  bool classical() const { return sigma_lo == sigma_hi; }
};

// Uniform grid 0 = t_0 < ... < t_N = t_end, reproducible from (t_end, n_steps).
struct TimeGrid {
  double t_end = 0.0;
  std::size_t n_steps = 0;
  std::vector<double> times;

  double dt() const { return t_end / static_cast<double>(n_steps); }
};

// (seed, stream_id) fully determines the normal-variate stream, independent
// of scheduling or thread count.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  SeedSpec with_stream(std::uint64_t id) const { return {seed, id}; }
};

// G(alpha) = (sigma_hi^2 * alpha^+ - sigma_lo^2 * alpha^-) / 2
double g_function(double alpha, const GParams& params);

TimeGrid make_grid(double t_end, std::size_t n_steps);

std::vector<double> normal_stream(const SeedSpec& spec, std::size_t count);

// Deterministic per-stream normal generator; same sequence as normal_stream.
class NormalSource {
 public:
  explicit NormalSource(const SeedSpec& spec);

  double next();
  void fill(std::vector<double>& out, std::size_t count);

 private:
  std::uint64_t next_u64();

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace gcalc
