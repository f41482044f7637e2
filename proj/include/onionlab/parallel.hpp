#pragma once

#include <cstddef>
#include <functional>

namespace onionlab {

/// Worker count: `requested` if positive, else ONIONLAB_THREADS, else the
/// hardware concurrency.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Callers
/// write results into slot i, so the outcome does not depend on scheduling.
/// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace onionlab
