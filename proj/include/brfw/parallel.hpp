#pragma once

#include <cstddef>
#include <functional>

namespace brfw {

/// Worker count from BRFW_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written per index are independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace brfw
