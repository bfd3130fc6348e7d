#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace xqgram {

// Runs fn(i) for i in [0, n). Work items must be independent; callers write
// results into index-addressed slots so the outcome does not depend on
// scheduling. threads == 0 picks the hardware concurrency; threads == 1 runs
// inline. The first exception thrown by a work item is rethrown.
inline void parallel_for(long n, const std::function<void(long)>& fn,
                         int threads = 0) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  unsigned want = threads > 0 ? static_cast<unsigned>(threads) : (hw ? hw : 1);
  if (want > static_cast<unsigned>(n)) want = static_cast<unsigned>(n);
  if (want <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n || failed.load(std::memory_order_relaxed)) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(want);
  for (unsigned w = 0; w < want; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace xqgram
