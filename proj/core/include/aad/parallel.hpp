#pragma once

#include <cstddef>
#include <functional>

namespace aad {

// Worker count: AAD_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
// write results into preallocated slots so the output does not depend on the
// number of workers or on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace aad
