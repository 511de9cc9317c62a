#pragma once

#include <cstddef>
#include <functional>

namespace tubalkit {

// Worker count: TUBALKIT_THREADS if set, else hardware concurrency.
std::size_t thread_count();

// Runs fn(i) for i in [0, count). Static contiguous partition, so results
// are deterministic for a fixed thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace tubalkit
