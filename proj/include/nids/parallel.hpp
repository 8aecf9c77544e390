#pragma once

#include <cstddef>
#include <functional>

namespace nids {

// Worker count from NIDS_THREADS, else hardware concurrency (at least 1).
std::size_t default_thread_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write results into pre-sized slots so output order never depends on the
// number of workers. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace nids
