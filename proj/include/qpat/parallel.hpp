#pragma once

#include <functional>

namespace qpat {

/// Worker count: hardware concurrency capped by QPAT_THREADS when set.
int thread_count();

/// Runs fn(i) for i in [0, n) over contiguous chunks; nested calls from a
/// worker run serially. Each index is visited exactly once, so writes to
/// per-index slots are deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace qpat
