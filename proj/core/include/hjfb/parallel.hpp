#pragma once

#include <cstddef>
#include <functional>

namespace hjfb {

/// Worker count: HJ_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs body(begin, end) over disjoint chunks of [0, n). Work below `grain`
/// items per thread runs on the calling thread. Each index is visited exactly
/// once, so per-index writes give results independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 2048);

}  // namespace hjfb
