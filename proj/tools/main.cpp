#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gcalc/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read config file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G-Brownian motion numerical laboratory"};

  std::string config_path;
  bool list = false;
  bool check_only = false;
  std::string seed_override;
  std::string out_override;

  app.add_option("config", config_path, "experiment config file (key = value lines)");
  app.add_flag("--list", list, "print the experiment registry as JSON and exit");
  app.add_flag("--check", check_only, "parse and validate the config, exit 0/1");
  app.add_option("--seed", seed_override, "override the config's seed");
  app.add_option("--out", out_override, "override the config's out_dir");

  CLI11_PARSE(app, argc, argv);

  if (list) {
    std::cout << gcalc::registry_manifest_json() << "\n";
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "error: a config file is required (or use --list)\n";
    return 1;
  }

  try {
    auto config = gcalc::parse_config(read_file(config_path));
    if (!seed_override.empty()) {
      config.seed = std::stoull(seed_override);
    }
    if (!out_override.empty()) {
      config.out_dir = out_override;
    }
    if (check_only) {
      std::cout << "config ok: experiment = " << config.experiment << "\n";
      return 0;
    }

    const auto report = gcalc::run_experiment(config);
    for (const auto& [key, value] : report.summary) {
      std::cout << key << " = " << value << "\n";
    }
    for (const auto& [name, ok] : report.assertions) {
      std::cout << "assert." << name << " = " << (ok ? "pass" : "fail") << "\n";
    }
    for (const auto& path : report.outputs) {
      std::cout << "output = " << path << "\n";
    }
    std::cout << "wall_seconds = " << gcalc::format_double(report.wall_seconds)
              << "\n";
    std::cout << "result = " << (report.all_passed() ? "pass" : "fail") << "\n";
    return report.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
