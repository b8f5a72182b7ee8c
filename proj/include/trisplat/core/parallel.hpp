#pragma once

#include <cstdint>
#include <functional>

namespace trisplat {

// Process-wide worker pool. All parallel work in the engine is expressed as
// parallel_for over an index range with disjoint outputs (or outputs merged
// later in a fixed order), so results never depend on scheduling.
void set_worker_threads(int n);
int worker_threads();

// Runs fn(begin..end) partitioned into contiguous chunks across the pool.
// fn(i) must not touch state shared with other indices.
void parallel_for(int64_t n, const std::function<void(int64_t)>& fn);

// Chunked variant: fn(lo, hi) per contiguous chunk.
void parallel_for_chunks(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

}  // namespace trisplat
