#pragma once

#include <cstddef>
#include <functional>

namespace rgg {

/// Worker count used by parallel_for; 0 or 1 means run inline.
void set_threads(unsigned n);
unsigned threads();

/// Runs body(begin, end) over static contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the thread count, and callers write to
/// disjoint indexed slots, so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace rgg
