#ifndef HWDD_PARALLEL_HPP
#define HWDD_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hwdd {

/// Worker cap from the HWDD_THREADS environment variable; 0 or unset means
/// use the hardware concurrency.
unsigned workerCount();

/// Run fn(i) for i in [0, n) on up to workerCount() threads. Falls back to a
/// plain loop for small n or a single worker. Exceptions from workers are
/// rethrown on the calling thread.
void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hwdd

#endif
