#pragma once

#include <cstddef>
#include <functional>

namespace kscdf {

// Number of workers to use: `hint` (0 means hardware concurrency), capped
// by the KSCDF_THREADS environment variable when set.
unsigned worker_count(unsigned hint);

// Calls body(i) for i in [0, count) on up to `workers` threads. Each index
// runs exactly once; the first exception thrown is rethrown after all
// workers have joined.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace kscdf
