#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lrp {

// Runs fn(index, worker) for index in [0, n) on `workers` threads. Results must be
// written to index-owned slots; scheduling never affects them.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn, std::size_t chunk = 64) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= chunk) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&](int w) {
    try {
      while (true) {
        const std::size_t start = next.fetch_add(chunk);
        if (start >= n) return;
        const std::size_t stop = std::min(n, start + chunk);
        for (std::size_t i = start; i < stop; ++i) fn(i, w);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lrp
