#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace hfl {

// Runs body(i) for i in [0, count). Each item writes only to its own output
// slot and derives its own seed, so the result is identical for any `jobs`.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        workers.emplace_back([=, &body]() {
            for (std::size_t i = t; i < count; i += n_threads) body(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace hfl
