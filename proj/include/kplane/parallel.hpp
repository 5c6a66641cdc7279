#pragma once

#include <cstddef>
#include <functional>

namespace kplane {

/// Worker count used by parallel_for. Defaults to 1; values < 1 are clamped.
void set_thread_count(int n);
int thread_count();

/// Calls body(i) for every i in [0, n), splitting the range into contiguous
/// chunks across thread_count() workers. Each index is visited exactly once,
/// so callers that write only to slot i get results independent of the
/// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kplane
