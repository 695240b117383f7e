#pragma once

#include <cstddef>
#include <functional>

namespace toruslab {

/// Worker cap: hardware concurrency, lowered by TORUSLAB_THREADS if set.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index writes its own output slot, so
/// results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace toruslab
