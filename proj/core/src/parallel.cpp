#include "kldesign/parallel.hpp"

#include <atomic>

#include <omp.h>

namespace kld {
namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int threads) { g_threads = threads < 0 ? 0 : threads; }

int thread_count() {
  const int t = g_threads.load();
  return t > 0 ? t : omp_get_max_threads();
}

}  // namespace kld
