#pragma once

#include <cstddef>
#include <functional>

namespace mvlab {

/// Worker count from MVLAB_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Runs body(lo, hi) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and the worker count, and every index is visited once.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace mvlab
