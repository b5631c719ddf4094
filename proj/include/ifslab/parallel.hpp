#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ifslab {

// Deterministic parallel loop over [0, n). The body must write only to
// index-owned slots; all randomness must come from per-index streams. Under
// that contract the result is bit-identical for every worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t w = std::min<std::size_t>(std::size_t(workers), n);
    std::size_t grain = std::max<std::size_t>(1, n / (8 * w));
    std::atomic<std::size_t> cursor{0};
    auto run = [&] {
        for (;;) {
            std::size_t begin = cursor.fetch_add(grain);
            if (begin >= n) return;
            std::size_t end = std::min(n, begin + grain);
            for (std::size_t i = begin; i < end; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(w - 1);
    for (std::size_t t = 1; t < w; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

}  // namespace ifslab
