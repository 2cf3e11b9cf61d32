#pragma once

#include <cstddef>
#include <functional>

namespace nullrx {

/// Worker count: hardware concurrency, capped by NULLRX_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Each index is visited exactly once; the first exception thrown by any
/// body is rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nullrx
