#pragma once

#include <cstddef>
#include <functional>

namespace loadcast {

/// Number of hardware threads, at least 1.
int default_thread_count();

/// Runs fn(begin, end) over [0, n) split into fixed-size chunks of `grain`
/// items, distributed across up to `threads` workers.
///
/// Chunk boundaries depend only on n and grain, never on the thread count,
/// so callers that reduce per-chunk results in chunk-index order get
/// bit-identical totals regardless of scheduling. fn must not throw across
/// chunks it does not own; exceptions are rethrown on the calling thread.
void parallel_chunks(std::size_t n, std::size_t grain, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace loadcast
