#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gsc {

/// Kernel execution policy. Parallel kernels and the serial references in
/// gsc::ref must produce bitwise-identical results; per-site work never
/// depends on evaluation order.
enum class Execution { Serial, Parallel };

inline void set_worker_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class F>
void parallel_for(std::int64_t count, Execution exec, F&& body) {
    if (exec == Execution::Serial) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < count; ++i) body(i);
}

}  // namespace gsc
