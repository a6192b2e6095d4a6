#pragma once

#include <cstddef>
#include <functional>

namespace qgsw {

/// Name of the environment variable that sets the default worker count.
inline constexpr const char* kWorkerEnvVar = "QGSW_WORKERS";

/// QGSW_WORKERS if set to an integer >= 1, else std::thread::hardware_concurrency() (at least 1).
std::size_t default_worker_count();

/// Calls body(i) for i in [0, n), splitting the range into contiguous blocks over
/// `workers` threads. Each index is handled by exactly one call, so any
/// per-index computation is bit-identical regardless of the worker count.
/// The first exception thrown by a worker is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace qgsw
