#pragma once

#include <cstddef>
#include <functional>

namespace homsim {

// Index-parallel loop whose result is identical to running fn(0..n-1)
// sequentially; workers own disjoint index sets and any exception is
// rethrown on the caller. HOMSIM_THREADS caps the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::size_t worker_count();

}  // namespace homsim
