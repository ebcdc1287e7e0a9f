#include <benchmark/benchmark.h>

#include <cmath>

#include "gcalc/gheat.hpp"
#include "gcalc/localtime.hpp"
#include "gcalc/sampler.hpp"

using namespace gcalc;

namespace {

SamplePath make_path(std::size_t n_steps) {
  const TimeGrid grid = make_grid(1.0, n_steps);
  const ControlPath control(grid, std::vector<double>(n_steps, 1.0),
                            GParams(1.0, 1.0));
  return sample_path(control, normal_stream({1, 0}, n_steps));
}

void BM_sample_path(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const TimeGrid grid = make_grid(1.0, n);
  const ControlPath control(grid, std::vector<double>(n, 1.0), GParams(1.0, 1.0));
  const auto noise = normal_stream({1, 0}, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_path(control, noise));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_sample_path)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 16);

void BM_normal_stream(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_stream({1, stream++}, n));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_normal_stream)->Arg(1 << 10)->Arg(1 << 16);

void BM_window_local_time(benchmark::State& state) {
  const auto path = make_path(static_cast<std::size_t>(state.range(0)));
  const double eps = std::sqrt(path.grid.dt());
  for (auto _ : state) {
    benchmark::DoNotOptimize(window_local_time(path, 0.0, eps));
  }
}
BENCHMARK(BM_window_local_time)->Arg(1 << 12)->Arg(1 << 16);

void BM_tanaka_local_time(benchmark::State& state) {
  const auto path = make_path(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tanaka_local_time(path, 0.0));
  }
}
BENCHMARK(BM_tanaka_local_time)->Arg(1 << 12)->Arg(1 << 16);

void BM_solve_gheat(benchmark::State& state) {
  const GParams params(0.5, 1.0);
  const double dx = 1.0 / static_cast<double>(state.range(0));
  const auto grid = default_space_grid(1.0, params, dx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_gheat([](double x) { return std::abs(x); }, 1.0, params, grid));
  }
}
BENCHMARK(BM_solve_gheat)->Arg(20)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
