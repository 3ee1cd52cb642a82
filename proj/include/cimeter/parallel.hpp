#pragma once

#include <cstddef>
#include <functional>

namespace cimeter {

/// Worker count: CIMETER_THREADS if set and positive, otherwise hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, count) over thread_count() workers in contiguous blocks.
/// The first exception thrown (lowest index) is rethrown after all workers join.
/// Callers write results into per-index slots so output never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace cimeter
