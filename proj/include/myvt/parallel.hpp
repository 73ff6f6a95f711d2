#pragma once

#include <cstddef>
#include <functional>

namespace myvt {

/// Worker cap from MYVT_THREADS; 1 (deterministic single-threaded) when unset or invalid.
int worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written to per-index slots do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace myvt
