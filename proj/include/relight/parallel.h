// Deterministic row-parallel loops.
#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relight {

// Worker count actually used for a requested value (0 = hardware).
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls func(i) for i in [0, count). Items are handed out in contiguous
// blocks; each item must write only its own outputs, so results do not
// depend on the worker count.
template <typename Func>
void parallel_for(int count, int workers, Func&& func) {
  const int nthreads = std::min(resolve_workers(workers), std::max(count, 1));
  if (nthreads <= 1) {
    for (int i = 0; i < count; ++i) func(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    const int begin = static_cast<int>(static_cast<long long>(count) * t / nthreads);
    const int end = static_cast<int>(static_cast<long long>(count) * (t + 1) / nthreads);
    threads.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i) func(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace relight
