#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fdmix::detail {

// Runs body(i) for i in [0, n) on up to `threads` workers (0: hardware
// concurrency). Callers write results into slot i, so the merge order never
// depends on scheduling. The first exception by worker index is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, const Body& body) {
    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = unsigned(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += t) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fdmix::detail
