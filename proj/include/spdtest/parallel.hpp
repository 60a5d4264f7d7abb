#ifndef SPDTEST_PARALLEL_HPP
#define SPDTEST_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace spdtest {

/// Run fn(0), ..., fn(count-1) on up to `threads` workers (0 = hardware
/// concurrency). Jobs must be independent and write only to their own
/// slots; scheduling order carries no information, so results are
/// identical for every thread count. The lowest-index exception is
/// rethrown after all workers have stopped.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

/// Effective worker count used by parallel_for for a given job count.
unsigned resolve_threads(std::size_t count, unsigned threads);

}  // namespace spdtest

#endif  // SPDTEST_PARALLEL_HPP
