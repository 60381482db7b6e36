/**
 * @file parallel.hpp
 * @brief Fan-out of independent tasks over a fixed number of worker threads.
 */
#pragma once

#include <cstddef>
#include <functional>

namespace odeup {

/// 0 means one worker per hardware thread.
[[nodiscard]] unsigned resolve_jobs(unsigned jobs);

/// Calls task(i) for i in [0, count) on up to `jobs` threads. Tasks must not
/// share mutable state. If tasks throw, the exception of the lowest failing
/// index is rethrown after all workers stop, so failures are reported
/// deterministically.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

}  // namespace odeup
