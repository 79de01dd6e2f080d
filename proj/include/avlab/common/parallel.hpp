#pragma once

#include <cstddef>
#include <functional>

namespace avlab {

/// Number of workers used when a caller passes 0.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on `threads` workers. Work items are claimed
/// dynamically, so results must be written by index for determinism. The
/// first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace avlab
