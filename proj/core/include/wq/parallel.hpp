#pragma once

#include <cstdint>
#include <functional>

namespace wq {

/// Worker count: `requested` if positive, else WQ_THREADS, else hardware.
int resolve_threads(int requested);

/// Runs block_fn(begin, end) over a static partition of [begin, end) across
/// the given number of workers. Partitioning depends only on (range, threads),
/// and callers index output slots by iteration, so results are
/// schedule-independent.
void parallel_for(std::int64_t begin, std::int64_t end, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& block_fn);

}  // namespace wq
