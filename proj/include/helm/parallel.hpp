#pragma once

// OpenMP shims and deterministic reductions. Element kernels run in two
// modes: Serial is the plain reference loop, Parallel fills per-element
// slots concurrently and reduces them in a fixed pairwise order, so the
// result does not depend on the thread count.

#if defined(_OPENMP)
#include <omp.h>
#else
#pragma GCC diagnostic ignored "-Wunknown-pragmas"
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
inline void omp_set_num_threads(int) {}
#endif

#include <cstddef>
#include <span>
#include <vector>

namespace helm {

enum class ExecPolicy { Serial, Parallel };

// Applies the HELM_THREADS cap (if set). Safe to call more than once.
void init_threads();

int max_threads();

// Fixed-association pairwise sum: identical result for any thread count.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  const std::size_t n = v.size();
  if (n == 0) return T{};
  if (n <= 32) {
    T s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

} // namespace helm
