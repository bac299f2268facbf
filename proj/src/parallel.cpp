#include "had/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace had::par {

namespace {
std::atomic<int> g_override{0};
}

void set_thread_override(int n) { g_override.store(n < 0 ? 0 : n); }

int thread_override() { return g_override.load(); }

int thread_count() {
  int n = g_override.load();
  if (n >= 1) return n;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace had::par
