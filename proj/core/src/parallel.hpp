#pragma once

#include <cstddef>
#include <functional>

namespace parisi::detail {

/// Worker count: PARISI_THREADS if set and positive, otherwise the hardware
/// concurrency.
unsigned thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are
/// disjoint, so bodies writing to per-index slots need no locking. Calls made
/// from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 64);

}  // namespace parisi::detail
