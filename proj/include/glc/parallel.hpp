#pragma once

#include <functional>

namespace glc {

/// Runs fn(0..n-1) on a small thread pool. Results must be written to
/// per-index slots by the caller; reductions stay deterministic because they
/// happen after the join in index order. GLC_THREADS caps the pool; 1
/// serializes everything.
void parallel_for(int n, const std::function<void(int)>& fn);

int worker_count();

}  // namespace glc
