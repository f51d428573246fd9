#pragma once

#include <cstddef>
#include <functional>

namespace catbranch {

/// Worker count used by parallel_for (0 selects the machine's parallelism).
void set_worker_threads(std::size_t threads);
std::size_t worker_threads();

/// Runs body(begin, end) over [0, count) in blocks of `block` items. Blocks are
/// independent; callers write results into index-addressed slots so the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t block, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace catbranch
