#pragma once

#include <cstddef>
#include <functional>

namespace lcorr {

/// Number of worker threads used by node-parallel loops. Defaults to the
/// machine parallelism; LORENTZ_CORRUGATE_THREADS overrides it when set.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Calls body(begin, end) on disjoint contiguous chunks covering [0, n).
/// Chunks never share output slots, so results do not depend on the pool size.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Runs body(k) for every k in [0, n) in parallel. Any lcorr::Error thrown for
/// a node is collected; the one from the lowest node index is rethrown after
/// all workers finish.
void parallel_for_nodes(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lcorr
