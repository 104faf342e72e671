#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace clv {

// Worker cap from CLV_THREADS (0 or unset = serial).
inline int worker_count() {
    const char* env = std::getenv("CLV_THREADS");
    if (!env) return 0;
    int n = std::atoi(env);
    return n < 0 ? 0 : n;
}

// Runs fn(i) for i in [0, n). Each item must write only to its own slot so
// parallel and serial schedules produce identical results.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace clv
