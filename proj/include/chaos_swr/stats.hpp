#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace chaos {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact binomial (Clopper-Pearson) two-sided interval for k successes in
/// `trials` at confidence `conf` in (0, 1).
Interval clopper_pearson(std::uint64_t k, std::uint64_t trials, double conf);

/// Worker count: `requested` when nonzero, else the CHAOS_SWR_THREADS
/// environment variable, else hardware concurrency. Always >= 1.
std::size_t resolve_workers(std::size_t requested = 0);

/// Splits [0, count) into contiguous chunks, one per worker, and runs
/// body(begin, end) on each. Chunk boundaries never affect what a caller
/// computes per index, so results are independent of the worker count.
void parallel_chunks(std::uint64_t count, std::size_t workers,
                     const std::function<void(std::uint64_t, std::uint64_t)>& body);

}  // namespace chaos
