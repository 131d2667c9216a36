#pragma once

#include <cstddef>
#include <functional>

namespace advf {

/// Worker count: ADVF_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index runs exactly once; results must be
/// written to per-index slots so output order never depends on scheduling.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace advf
