#pragma once

#include <cstddef>
#include <functional>

namespace ccnet::threading {

/// Global cap on worker threads used by the numeric kernels. 0 means
/// hardware concurrency. Default is 1 (fully serial).
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn over [begin, end) split into contiguous chunks, one per worker.
/// Each index is processed by exactly one worker and workers write to
/// disjoint outputs, so results are bitwise independent of the thread
/// count. Runs inline when the range is small or only one thread is
/// configured.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn);

} // namespace ccnet::threading
