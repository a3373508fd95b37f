// Deterministic parallel helpers: results are independent of the worker count
// because work is split into fixed chunks whose partial results are combined
// in a fixed order (pairwise reduction).
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace convo {

/// Worker cap: CONVOMEASURE_THREADS if set (>=1), else hardware concurrency.
int worker_count();

/// Runs chunk_fn(chunk_index, begin, end) for a fixed partition of [0, n)
/// into chunks of at most `grain` items. Chunk boundaries do not depend on
/// the number of workers.
void parallel_chunks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& chunk_fn);

/// Pairwise (cascade) summation; deterministic and more accurate than a
/// running sum for long node lists.
double pairwise_sum(std::span<const double> v);

}  // namespace convo
