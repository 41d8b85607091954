#pragma once

#include <cstdint>
#include <functional>

namespace splitkit {

/// Runs body(i) for i in [0, count) across up to `jobs` threads.
///
/// Work items must not depend on execution order: callers seed each item via
/// derive_seed(seed, module, i) and write into preallocated slots, so results
/// are identical for any worker count.
void parallel_for(int jobs, std::int64_t count,
                  const std::function<void(std::int64_t)>& body);

/// Worker count: explicit argument if > 0, else the SPLITKIT_JOBS environment
/// variable, else 1.
int resolve_jobs(int requested);

}  // namespace splitkit
