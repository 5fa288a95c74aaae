#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace chanstat {

// Static block partition of [0, count) over worker threads.  Each index is
// processed exactly once and writes only its own outputs, so results are
// independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    threads = std::min({threads, count, static_cast<std::size_t>(64)});
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace chanstat
