#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace screenbem {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Each index owns its output slot, so results do not depend
/// on the thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
    unsigned nt = threads > 0 ? unsigned(threads) : std::thread::hardware_concurrency();
    if (nt == 0) nt = 1;
    if (nt == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (std::size_t(nt) > n) nt = unsigned(n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace screenbem
