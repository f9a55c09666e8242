#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gigmatch {

// Kernels with a data-parallel loop take an Exec; `serial` runs the
// reference implementation the parallel one is tested against.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace gigmatch
