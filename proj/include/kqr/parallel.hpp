#pragma once

#include <thread>
#include <vector>

namespace kqr {

/// Runs f(i) for i in [0, n) on up to `threads` workers. Each index writes
/// only its own output slot, so the merged result is independent of the
/// schedule; callers reduce deterministically by index afterwards.
template <class F>
void parallel_for(int threads, int n, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace kqr
