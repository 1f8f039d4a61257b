#pragma once

#include <cstddef>
#include <functional>

namespace tropkp {

// Worker count: TROPKP_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [0, n) on up to thread_count() threads. Results must
// be written to per-index slots so that output does not depend on
// scheduling. The first exception thrown (lowest index) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tropkp
