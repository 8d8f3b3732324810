#include "nlx/parallel.hpp"

#include <atomic>

namespace nlx {

namespace {
std::atomic<unsigned> g_threads{0};
}

bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}

void set_thread_count(unsigned threads) { g_threads.store(threads); }

unsigned thread_count() {
  const unsigned t = g_threads.load();
  if (t != 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace nlx
