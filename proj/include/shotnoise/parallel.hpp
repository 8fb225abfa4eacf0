#pragma once

#include <complex>
#include <cstddef>
#include <span>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shotnoise {

// Every data-parallel kernel takes an explicit shard count. Results must not
// depend on it: each loop index derives its own RNG stream and writes its own
// slot, so the OpenMP path and the serial reference are interchangeable
// bit-for-bit.
inline int effective_threads(int requested) {
#ifdef _OPENMP
    return requested > 1 ? requested : 1;
#else
    (void)requested;
    return 1;
#endif
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    threads = effective_threads(threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

// Pairwise (cascade) summation: fixed reduction tree, so merged statistics do
// not depend on shard count, with O(log n) error growth.
template <class T>
T pairwise_sum(std::span<const T> v) {
    if (v.size() <= 32) {
        T acc{};
        for (const T& x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <class T, class F>
auto pairwise_transform_sum(std::span<const T> v, F&& f) -> decltype(f(v[0])) {
    using R = decltype(f(v[0]));
    if (v.size() <= 32) {
        R acc{};
        for (const T& x : v) acc += f(x);
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_transform_sum(v.subspan(0, half), f) +
           pairwise_transform_sum(v.subspan(half), f);
}

} // namespace shotnoise
