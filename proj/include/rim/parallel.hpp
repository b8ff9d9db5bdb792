#pragma once

#include <cstddef>
#include <thread>

#ifdef RIM_HAS_OPENMP
#include <omp.h>
#endif

namespace rim {

// threads <= 0 means "use the hardware concurrency".
inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Data-parallel map over [0, n). Every iteration must write only to its own
// output slot; under that contract the result is bit-identical for any thread
// count, so parallel runs reproduce the serial reference exactly.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const int nt = resolve_threads(threads);
#ifdef RIM_HAS_OPENMP
    if (nt > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)nt;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace rim
