// Execution-policy layer: every data-parallel inner loop in the library runs
// through these kernels. Two implementations are kept side by side — an
// OpenMP one and a plain serial one — selectable at runtime, so tests can
// compare them and benchmarks can time them. Kernels only parallelize over
// independent output slots or max-reductions; results are identical for any
// thread count.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pimsner::kern {

enum class Exec { Serial, OpenMP };

struct Config {
    Exec exec;
    int threads; // 0 = runtime default
};

inline Config& config() {
    static Config cfg = [] {
        Config c;
#ifdef _OPENMP
        c.exec = Exec::OpenMP;
#else
        c.exec = Exec::Serial;
#endif
        c.threads = 0;
        if (const char* env = std::getenv("PIMSNER_LAB_THREADS")) {
            int t = std::atoi(env);
            if (t == 1) c.exec = Exec::Serial;
            if (t > 0) c.threads = t;
        }
        return c;
    }();
    return cfg;
}

inline void set_exec(Exec e) { config().exec = e; }
inline void set_threads(int t) { config().threads = t; }

// for_index(n, fn): fn(i) for i in [0, n), each i writing only its own slots.
template <class F>
void for_index(std::int64_t n, F&& fn) {
#ifdef _OPENMP
    if (config().exec == Exec::OpenMP && n > 1) {
        int t = config().threads;
#pragma omp parallel for schedule(static) num_threads(t > 0 ? t : omp_get_max_threads())
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// Serial reference, kept verbatim for A/B tests against the parallel path.
template <class F>
void for_index_serial(std::int64_t n, F&& fn) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// max_index(n, fn): max over i of fn(i) -> double; max is order-insensitive.
template <class F>
double max_index(std::int64_t n, F&& fn) {
    double m = 0.0;
#ifdef _OPENMP
    if (config().exec == Exec::OpenMP && n > 1) {
        int t = config().threads;
#pragma omp parallel for schedule(static) reduction(max : m) num_threads(t > 0 ? t : omp_get_max_threads())
        for (std::int64_t i = 0; i < n; ++i) {
            double v = fn(i);
            if (v > m) m = v;
        }
        return m;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        double v = fn(i);
        if (v > m) m = v;
    }
    return m;
}

template <class F>
double max_index_serial(std::int64_t n, F&& fn) {
    double m = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        double v = fn(i);
        if (v > m) m = v;
    }
    return m;
}

} // namespace pimsner::kern
