#pragma once

#include <cstddef>
#include <functional>

namespace rssac {

/// Number of worker threads used by parallel_for. Reads RSSAC_WORKERS when set,
/// otherwise std::thread::hardware_concurrency().
int worker_count();

/// Overrides the worker count for this process (0 restores the environment default).
void set_worker_count(int workers);

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// must only write to per-index slots so results are independent of the split.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rssac
