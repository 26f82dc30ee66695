#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace softirl {

/// Runs fn(i) for i in [0, n) across up to `threads` workers on contiguous
/// index chunks. Callers are responsible for making the work items
/// independent (e.g. one RNG child stream per index); results must be
/// written to per-index slots so the outcome does not depend on the width.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min({threads, n, static_cast<int>(std::thread::hardware_concurrency())}));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace softirl
