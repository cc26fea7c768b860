#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace edgelab {

/// Resolves a requested worker count; 0 means "one per hardware thread".
inline std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on `workers` threads with static
/// contiguous chunks. Bodies must only write to index-owned slots, which makes
/// every result independent of the worker count. The first exception thrown
/// (lowest chunk) is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
    workers = std::clamp<std::size_t>(resolve_workers(workers), 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(count, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace edgelab
