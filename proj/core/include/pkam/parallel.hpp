#pragma once

#include <cstddef>
#include <functional>

namespace pkam {

/// Number of worker threads for grid loops. Reads PKAM_THREADS once; falls
/// back to the hardware concurrency.
int thread_count();

/// Overrides the thread count (0 restores the environment default).
void set_thread_count(int threads);

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks never
/// overlap, so bodies that only write their own indices are deterministic
/// regardless of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace pkam
