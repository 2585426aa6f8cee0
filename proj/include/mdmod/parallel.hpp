#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mdmod {

inline unsigned worker_count() {
    if (const char* env = std::getenv("MDMOD_THREADS")) {
        const long n = std::atol(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

/// Run fn(task) for task = 0..count-1 on a small pool. Each task writes only
/// its own output slot, so results are identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned workers = count < 2 ? 1 : std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t t = 0; t < count; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t t = next.fetch_add(1);
                if (t >= count) return;
                fn(t);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace mdmod
