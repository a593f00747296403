#include "chemostat/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace chemostat {

int worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

}  // namespace chemostat
