#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace panolayout {

// PANOLAYOUT_WORKERS overrides the pool size; defaults to the hardware
// concurrency (1 on a single-core host, which keeps everything sequential).
inline int worker_count() {
  if (const char* env = std::getenv("PANOLAYOUT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(0..n-1) over a shared-nothing worker pool. Callers keep results
// order-stable by writing into preallocated slots. The first worker
// exception is rethrown on the calling thread; with one worker the call runs
// inline.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace panolayout
