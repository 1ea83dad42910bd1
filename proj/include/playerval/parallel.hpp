#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace playerval {

// Data-parallel loop over [0, n). n_threads = 1 forces the serial reference
// path (used by tests and the benchmark); 0 takes the OpenMP default. Every
// kernel dispatched through here writes results only by index, so thread
// count never changes the output bytes.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
#ifdef _OPENMP
    if (n_threads != 1 && n > 1) {
        const int threads = n_threads > 0 ? n_threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace playerval
