#include "helm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace helm {

void init_threads() {
#if defined(_OPENMP)
  if (const char* env = std::getenv("HELM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < omp_get_max_threads()) omp_set_num_threads(cap);
  }
#endif
}

int max_threads() { return omp_get_max_threads(); }

} // namespace helm
