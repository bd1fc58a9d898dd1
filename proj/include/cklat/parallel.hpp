#pragma once
// Deterministic parallel helpers.
//
// Every batch operation in this library reduces over fixed-size chunks:
// partial results are computed serially inside each chunk, chunks run in
// parallel, and the final fold walks chunks in index order.  Outputs are
// therefore bit-identical for any thread count, which the CLI and the
// acceptance suite rely on.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "dd.hpp"

namespace cklat {

int hardware_threads();
void set_thread_budget(int n);   // 0 = all hardware threads
int thread_budget();

namespace detail {
void run_indexed(std::size_t n, void* ctx, void (*fn)(void*, std::size_t));
}

// fn(i) for i in [0, n); fn writes only state owned by index i.
template <class F>
void parallel_index(std::size_t n, F&& fn) {
    detail::run_indexed(n, &fn, [](void* ctx, std::size_t i) {
        (*static_cast<F*>(ctx))(i);
    });
}

// Deterministic compensated sum of term(i), i in [0, n).
template <class F>
double chunked_sum(std::size_t n, std::size_t chunk, F&& term) {
    if (n == 0) return 0.0;
    std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    parallel_index(nchunks, [&](std::size_t c) {
        std::size_t lo = c * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        kahan acc;
        for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
        partial[c] = acc.sum();
    });
    kahan total;
    for (double p : partial) total.add(p);
    return total.sum();
}

// Serial reference for the reduction above (kept for tests and benchmarks).
template <class F>
double chunked_sum_serial(std::size_t n, std::size_t chunk, F&& term) {
    if (n == 0) return 0.0;
    std::size_t nchunks = (n + chunk - 1) / chunk;
    kahan total;
    for (std::size_t c = 0; c < nchunks; ++c) {
        std::size_t lo = c * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        kahan acc;
        for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
        total.add(acc.sum());
    }
    return total.sum();
}

}  // namespace cklat
