#pragma once

#include <cstddef>
#include <functional>

namespace arfrd {

//! Worker count: ARFRD_NUM_THREADS if set and positive, else hardware concurrency.
int default_threads();

//! Runs fn(i) for i in [0, n) on up to `threads` workers (0 means default_threads()).
//! The first exception thrown by any worker is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

} // namespace arfrd
