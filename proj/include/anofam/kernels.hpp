#pragma once

#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anofam {

// Execution policy for the data-parallel kernels. Every kernel has a serial
// reference path; the parallel path must produce bitwise identical results
// (max/min reductions and independent element writes only, no ordered sums).
enum class Exec { serial, parallel };

// index-parallel loop with independent writes; fn(i) for i in [0, n)
template <class F>
void parFor(Exec exec, std::int64_t n, F&& fn) {
#ifdef _OPENMP
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    (void)exec;
    for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// max reduction of fn(i) over [0, n); exact and order-independent for doubles
template <class F>
double parMax(Exec exec, std::int64_t n, F&& fn) {
    double best = -std::numeric_limits<double>::infinity();
#ifdef _OPENMP
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(max : best)
        for (std::int64_t i = 0; i < n; ++i) {
            const double v = fn(i);
            if (v > best) best = v;
        }
        return best;
    }
#endif
    (void)exec;
    for (std::int64_t i = 0; i < n; ++i) {
        const double v = fn(i);
        if (v > best) best = v;
    }
    return best;
}

template <class F>
double parMin(Exec exec, std::int64_t n, F&& fn) {
    return -parMax(exec, n, [&](std::int64_t i) { return -fn(i); });
}

// Deterministic RNG for sample-point generation. Wraps a splitmix64-style
// generator so the stream does not depend on library internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t nextU64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double nextDouble() { return double(nextU64() >> 11) * 0x1.0p-53; }
    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * nextDouble(); }

private:
    std::uint64_t state_;
};

}  // namespace anofam
