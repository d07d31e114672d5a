#pragma once

#include <cstddef>
#include <functional>

namespace autotag {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. The first exception
// thrown by any task is rethrown after all workers stop. jobs <= 1 runs
// inline in index order.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

} // namespace autotag
