// Minimal parallel map over an index range.
//
// Work items self-schedule off a shared atomic counter, results are written
// into caller-owned slots by index, and reductions happen after the join in
// index order -- so outputs are identical for any worker count.
#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace parares {

// Resolve a requested worker count: explicit value wins, then the
// PARARES_THREADS environment variable, then hardware concurrency.
inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PARARES_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

template <class Body>
void parallel_for(std::size_t n, int n_threads, Body&& body) {
  n_threads = resolve_thread_count(n_threads);
  if (n == 0) return;
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> counter{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = counter.fetch_add(1, std::memory_order_relaxed);
      if (i >= n || failed.load(std::memory_order_relaxed)) return;
      try {
        body(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();  // join
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace parares
