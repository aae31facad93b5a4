#pragma once

#include <cstddef>
#include <functional>

namespace gaussrec {

/// Worker count: RECON_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
int default_thread_count();

/// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks are
/// claimed dynamically, so each task must write only to its own output slot.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

}  // namespace gaussrec
