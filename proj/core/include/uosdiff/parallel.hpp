#pragma once

#include <cstddef>
#include <functional>

namespace uosdiff {

/// Worker count: UOSDIFF_WORKERS if set and positive, otherwise the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads with a static
/// contiguous partition. body must only write to index-owned state, so the
/// result is independent of the number of threads. The first exception
/// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace uosdiff
