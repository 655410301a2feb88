#include "projcond/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace projcond {

int thread_count() {
    static const int cached = [] {
#ifdef _OPENMP
        int n = omp_get_max_threads();
#else
        int n = 1;
#endif
        if (const char* env = std::getenv("PROJCOND_THREADS")) {
            try {
                int v = std::stoi(env);
                if (v > 0) n = v;
            } catch (...) {
            }
        }
        return n > 0 ? n : 1;
    }();
    return cached;
}

}  // namespace projcond
