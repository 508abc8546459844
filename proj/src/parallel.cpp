#include "bellsim/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bellsim/errors.hpp"

namespace bellsim {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // fall through to the error below
    }
    throw ParseError(std::string(kWorkersEnvVar) + " must be a positive integer, got '" +
                     env + "'");
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace bellsim
