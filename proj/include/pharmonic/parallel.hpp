#pragma once

// Index-parallel map over std::thread. Results land in index order, so the
// reduction that follows is independent of the thread count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pharmonic {

/// PHARMONIC_THREADS if set and positive, otherwise the hardware count.
inline unsigned thread_count() {
  if (const char* env = std::getenv("PHARMONIC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i < n. The first exception thrown by any task is
/// rethrown after all workers stop.
template <class T, class Fn>
std::vector<T> parallel_map(size_t n, Fn&& fn) {
  std::vector<T> out(n);
  const unsigned workers = static_cast<unsigned>(std::min<size_t>(thread_count(), n));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace pharmonic
