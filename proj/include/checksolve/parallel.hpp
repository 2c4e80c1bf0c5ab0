#pragma once

#include <cstddef>
#include <functional>

namespace checksolve {

/// Number of worker threads: CHECKSOLVE_THREADS if set, else the hardware
/// concurrency, capped at 16.
int worker_count();

/// Runs body(i) for i in [0, n) on the worker pool. Results must be written
/// to disjoint slots; the partitioning is deterministic. Exceptions from the
/// body are collected and the first one rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace checksolve
