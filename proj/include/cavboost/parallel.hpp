#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cavboost {

/// Evaluates fn(0), ..., fn(count - 1) on a small worker pool. Results are
/// stored by index, so the output never depends on scheduling. The first
/// exception thrown by any task is rethrown after all workers join.
template <typename Fn>
auto parallel_map(int count, Fn&& fn) -> std::vector<decltype(fn(0))> {
  using T = decltype(fn(0));
  std::vector<T> out(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return out;
  const int workers =
      std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, count);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace cavboost
