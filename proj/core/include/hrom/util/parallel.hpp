#pragma once

#include <cstddef>
#include <functional>

namespace hrom {

/// Runs task(0..n-1) on up to `workers` threads (0 = hardware concurrency).
/// Tasks are claimed in index order. The first exception thrown by a task is
/// rethrown after all threads have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task);

/// Worker count from HYBRID_ROM_WORKERS, or `fallback` when unset or invalid.
std::size_t workers_from_env(std::size_t fallback);

}  // namespace hrom
