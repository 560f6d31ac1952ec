// SPDX-License-Identifier: MIT
// Thread budget and an index-ordered parallel map.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace polylab {

namespace detail {
inline int& thread_override() {
  static int v = 0;
  return v;
}
}  // namespace detail

// 0 restores the default (POLYLAB_THREADS, then machine parallelism).
inline void set_thread_budget(int n) {
  if (n < 0) throw ParameterError("thread budget must be >= 0");
  detail::thread_override() = n;
}

inline int thread_budget() {
  if (detail::thread_override() > 0) return detail::thread_override();
  if (const char* s = std::getenv("POLYLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) return static_cast<int>(v);
    throw ParameterError("POLYLAB_THREADS must be a positive integer, got '" + std::string(s) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// out[i] = fn(i); the result does not depend on the number of workers.
template <class T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn, int threads = 0) {
  std::vector<T> out(count);
  int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(threads > 0 ? threads : thread_budget())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = count;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        // keep the lowest failing index so the reported error is reproducible
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace polylab
