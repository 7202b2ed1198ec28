#pragma once

#include <cstddef>
#include <functional>

namespace sentiscope {

// Worker cap for ensemble training and cross-validation. Defaults to the
// hardware concurrency; results never depend on it.
std::size_t max_jobs();
void set_max_jobs(std::size_t jobs);

// Runs fn(0..n-1) on up to max_jobs() threads. If any call throws, the
// exception from the lowest index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sentiscope
