#include "sentiscope/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sentiscope {

namespace {
std::atomic<std::size_t> g_max_jobs{0};
thread_local bool t_in_parallel_region = false;

struct RegionGuard {
  bool previous = t_in_parallel_region;
  RegionGuard() { t_in_parallel_region = true; }
  ~RegionGuard() { t_in_parallel_region = previous; }
};
}  // namespace

std::size_t max_jobs() {
  const std::size_t set = g_max_jobs.load();
  if (set > 0) return set;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void set_max_jobs(std::size_t jobs) { g_max_jobs.store(jobs); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  // Nested regions run inline on the calling worker.
  const std::size_t workers = t_in_parallel_region ? 1 : std::min(max_jobs(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    RegionGuard guard;
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sentiscope
