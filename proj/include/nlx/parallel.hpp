#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nlx {

// Process-wide worker count used by parallel_for. 0 selects the hardware
// concurrency. Results never depend on this value.
void set_thread_count(unsigned threads);
unsigned thread_count();

// True on threads started by parallel_for; nested calls run serially there.
bool& inside_parallel_region();

// Splits [0, n) into contiguous chunks and runs fn(begin, end) on each chunk,
// one worker per chunk. Exceptions from workers are rethrown on the caller
// thread (first chunk wins).
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      inside_parallel_region() ? 1 : std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      inside_parallel_region() = true;
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace nlx
