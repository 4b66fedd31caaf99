#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace nehari {

// Runs fn(i) for every i in [0, n), splitting rows into contiguous blocks,
// one block per worker. fn(i) must touch only state owned by row i; callers
// combine row results afterwards in index order. Under that contract the
// thread count changes scheduling only, never a single bit of the result.
inline void parallel_rows(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n < 2) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int k = 0; k < workers; ++k) {
        const int lo = static_cast<int>(static_cast<long long>(n) * k / workers);
        const int hi = static_cast<int>(static_cast<long long>(n) * (k + 1) / workers);
        pool.emplace_back([&fn, lo, hi] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}
