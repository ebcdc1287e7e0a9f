#pragma once

#include <cstddef>
#include <functional>

namespace gcalc {

// Worker count: G_CALC_THREADS if set, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n) across workers. Callers write results into
// per-index slots so the output is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gcalc
