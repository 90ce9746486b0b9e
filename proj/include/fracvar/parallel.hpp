#pragma once

#include <cstddef>
#include <functional>

namespace fracvar {

/// Worker count for internal loops: FRACVAR_THREADS when set to a positive
/// integer, otherwise the hardware concurrency.
unsigned thread_budget();

/// Calls body(i) for i in [0, n) from up to thread_budget() threads. Each
/// index is processed exactly once; callers write to disjoint slots, so the
/// result does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t min_chunk = 32);

}  // namespace fracvar
