#ifndef CAVTUN_PARALLEL_HPP
#define CAVTUN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace cavtun {

// Worker count: hardware concurrency, capped by the CAVTUN_THREADS
// environment variable when set (minimum 1).
int max_threads();

// Runs fn(i) for i in [0, n). Iterations must be independent; each one
// writes only to its own output slot, so results are identical for any
// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace cavtun

#endif
