#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gcalc/core.hpp"
#include "gcalc/sampler.hpp"

namespace gcalc {

// Finite stand-in for the family of volatility measures: all bang-bang
// controls on block_count coarse blocks plus constant controls on a
// ladder_size-point value ladder in [sigma_lo, sigma_hi]. Always contains
// the two constant extremes.
struct ControlFamily {
  TimeGrid grid;
  GParams params;
  std::size_t block_count = 6;
  std::size_t ladder_size = 5;

  ControlFamily(TimeGrid g, GParams p, std::size_t blocks = 6, std::size_t ladder = 5);

  // Candidates sorted by signature (sigma sequence, lexicographic), deduped.
  std::vector<ControlPath> controls() const;

  static ControlFamily singleton(TimeGrid g, GParams p, double sigma);

 private:
  std::vector<double> fixed_sigmas_;  // non-empty: the family is exactly these constants
  ControlFamily(TimeGrid g, GParams p, std::vector<double> fixed);
};

struct EstimateReport {
  double value = 0.0;              // max of per_control_means
  ControlPath argmax_control;
  double std_error = 0.0;          // of the argmax control's mean
  std::size_t n_paths = 0;
  std::vector<double> per_control_means;  // in controls() order
};

using PathFunctional = std::function<double(const SamplePath&)>;

// Sup over the family of empirical means, common random numbers across
// controls: path i always uses stream (seeds.stream_id + i).
EstimateReport sublinear_expectation(const PathFunctional& functional,
                                     const ControlFamily& family,
                                     std::size_t n_paths, const SeedSpec& seeds);

struct BdgReport {
  double lhs = 0.0;  // sup-mean of sup_t |int eta dB|^{2p}
  double mid = 0.0;  // sup-mean of (int eta^2 d<B>)^p
  double hi = 0.0;   // sigma_hi^{2p} * sup-mean of (int eta^2 ds)^p
  double lo = 0.0;   // sigma_lo^{2p} * same
  double integral_mean = 0.0;  // sup-mean of int eta dB (unsquared)
  double integral_se = 0.0;    // std error at the argmax control of the mean
  bool pathwise_ordered = true;  // lo <= mid <= hi held on every path
};

// Step integrand: one value per grid interval, evaluated on the path.
using StepIntegrand = std::function<std::vector<double>(const SamplePath&)>;

BdgReport bdg_check(const StepIntegrand& integrand, const ControlFamily& family,
                    double p, std::size_t n_paths, const SeedSpec& seeds);

std::string control_signature(const ControlPath& control);

}  // namespace gcalc
