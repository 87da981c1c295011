#pragma once

#include <cstdlib>
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spikelab {

/// Worker-pool size used by parallel_for. 1 selects the serial reference
/// path. Initialized from SPIKELAB_THREADS (hardware default otherwise).
int num_threads();
void set_num_threads(int n);

/// Runs f(i) for i in [0, n) for coarse, possibly imbalanced tasks (branch
/// sweeps, fold tables, diagram cells): dynamic scheduling. The i-th result
/// must depend only on i, never on execution order; reductions stay outside
/// so serial and parallel runs produce identical bytes.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& f) {
    if (num_threads() <= 1 || n < 2) {
        // serial reference path, kept for testing and benchmarking
        for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(num_threads())
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#endif
}

/// Data-parallel inner loops (operator assembly): static scheduling, and
/// serial below `grain` iterations where fork-join overhead would dominate.
template <class F>
void parallel_for_grain(std::ptrdiff_t n, std::ptrdiff_t grain, F&& f) {
    if (num_threads() <= 1 || n < grain) {
        for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#endif
}

} // namespace spikelab
