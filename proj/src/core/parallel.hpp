#pragma once

#include <cstddef>
#include <functional>

namespace dislocate {

// Maximum worker count: DISLOCATE_THREADS if set, hardware concurrency
// otherwise, never less than 1.
int max_threads();

// Runs fn(i) for i in [0, count). Work is split across threads; results must
// be written by index so the output order is deterministic regardless of the
// schedule. Exceptions propagate to the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace dislocate
