#include "qmlab/kernels.hpp"

#include <cstdlib>
#include <string>

namespace qmlab::kernels {

int apply_thread_limit_from_env() {
  if (const char* env = std::getenv("QMLAB_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
      // Unparseable values leave the runtime default in place.
    }
  }
  return omp_get_max_threads();
}

}  // namespace qmlab::kernels
