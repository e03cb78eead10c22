#pragma once

#include <functional>

namespace twistlab {

/// Worker-pool width: TWISTLAB_THREADS if set (>=1), else hardware concurrency.
int thread_budget();

/// Runs fn(i) for i in [0, n) on a bounded pool. Chunks are assigned by index,
/// so callers that write to disjoint slots get deterministic results
/// regardless of the pool width.
void parallel_for(long n, const std::function<void(long)>& fn);

}  // namespace twistlab
