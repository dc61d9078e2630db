#include "hcl/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hcl {

int thread_cap() {
  const char* env = std::getenv("HCL_THREADS");
  if (!env) return 0;
  try {
    const int v = std::stoi(env);
    return v > 0 ? v : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

int configure_threads() {
#ifdef _OPENMP
  if (const int cap = thread_cap(); cap > 0) omp_set_num_threads(cap);
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hcl
