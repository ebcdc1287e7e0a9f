#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gcalc/core.hpp"

namespace gcalc {

struct ExperimentConfig {
  std::string experiment;
  double sigma_lo = 0.5;
  double sigma_hi = 1.0;
  double t_end = 1.0;
  std::size_t n_steps = 4096;
  std::size_t n_paths = 1000;
  std::string eps_rule = "sqrt-dt";  // or "fixed:<value>"
  std::size_t blocks = 6;
  std::size_t ladder = 5;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double bdg_cp = 4.0;  // classical BDG constant for p = 1

  GParams params() const { return GParams(sigma_lo, sigma_hi); }
  double eps_for(double dt) const;
};

struct RunReport {
  std::vector<std::string> outputs;  // CSV and SVG files written
  std::vector<std::pair<std::string, std::string>> summary;   // key = value lines
  std::vector<std::pair<std::string, bool>> assertions;       // name -> pass
  double wall_seconds = 0.0;

  bool all_passed() const;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> assertion_names;
};

const std::vector<ExperimentInfo>& experiment_registry();

// JSON manifest of the registry (names, descriptions, declared assertions).
std::string registry_manifest_json();

// key = value lines, one per line, '#' starts a comment. Unknown keys,
// duplicates and malformed numbers are rejected with the offending line.
ExperimentConfig parse_config(const std::string& text);

RunReport run_experiment(const ExperimentConfig& config);

// 17-significant-digit float formatting shared by every CSV writer.
std::string format_double(double x);

}  // namespace gcalc
