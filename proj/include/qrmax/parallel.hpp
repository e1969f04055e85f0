#pragma once

#include <cstddef>
#include <functional>

namespace qrmax {

/// Worker count: QRMAX_THREADS if set (clamped to >= 1), else hardware parallelism.
int worker_count();

/// Runs body(i) for i in [0, count). Bodies must write only to disjoint,
/// index-addressed slots; reductions happen afterwards on one thread, so
/// results are identical for any worker count.
void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qrmax
