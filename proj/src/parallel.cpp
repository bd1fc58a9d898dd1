#include "cklat/parallel.hpp"

#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cklat {

namespace {
int g_budget = 0;  // 0 = all hardware threads
}

int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

void set_thread_budget(int n) { g_budget = n < 0 ? 0 : n; }

int thread_budget() { return g_budget == 0 ? hardware_threads() : g_budget; }

namespace detail {

void run_indexed(std::size_t n, void* ctx, void (*fn)(void*, std::size_t)) {
#ifdef _OPENMP
    int nt = thread_budget();
    if (nt > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(ctx, static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(ctx, i);
}

}  // namespace detail
}  // namespace cklat
