#pragma once

#include <cstddef>
#include <functional>

namespace sigdrift::detail {

// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware concurrency).
// The first exception thrown by any call is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace sigdrift::detail
