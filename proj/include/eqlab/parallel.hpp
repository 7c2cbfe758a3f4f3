#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace eqlab {

// Worker count: explicit request, else EQLAB_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on up to `threads` workers, each taking a
// contiguous block. The first exception is rethrown on the caller.
template <typename Body>
void parallel_for(std::int64_t n, int threads, Body&& body)
{
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::int64_t>(n, 1))));
    if (threads == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            const std::int64_t lo = n * w / threads, hi = n * (w + 1) / threads;
            try {
                for (std::int64_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace eqlab
