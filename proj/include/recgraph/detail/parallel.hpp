#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace recgraph::detail {

inline unsigned default_jobs() noexcept {
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Work is claimed
/// dynamically; the first exception thrown by any task is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

} // namespace recgraph::detail
