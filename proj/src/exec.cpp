#include "shelf/exec.hpp"

#include <omp.h>

#include <cstdlib>

namespace shelf {

int worker_count() {
  if (const char* env = std::getenv("SHELF_SEARCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

}  // namespace shelf
