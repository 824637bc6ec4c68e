#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mhd2d {

/// Worker budget for embarrassingly parallel loops; capped by the
/// MHD2D_THREADS environment variable. Defaults to 1: the reference workloads
/// are small enough that determinism-by-simplicity wins, and parallel callers
/// store per-index results so any budget yields identical output.
inline int thread_budget() {
    static const int budget = [] {
        const char* env = std::getenv("MHD2D_THREADS");
        if (!env) return 1;
        const long v = std::strtol(env, nullptr, 10);
        return static_cast<int>(std::clamp(v, 1L, 64L));
    }();
    return budget;
}

/// Run fn(i) for i in [0, count); results must go to disjoint slots.
template <class Fn>
inline void parallel_for(size_t count, Fn&& fn) {
    const int budget = std::min<size_t>(thread_budget(), count);
    if (budget <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(budget);
    const size_t chunk = (count + budget - 1) / budget;
    for (int w = 0; w < budget; ++w) {
        const size_t lo = w * chunk;
        const size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace mhd2d
