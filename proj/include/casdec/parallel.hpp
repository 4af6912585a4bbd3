#pragma once

#include <cstddef>
#include <functional>

namespace casdec {

/// Worker count for sweeps: hardware concurrency, capped by CASDEC_THREADS.
int sweep_threads();

/// Calls fn(i) for i in [0, n), split into contiguous blocks across
/// sweep_threads() workers. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace casdec
