#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace needlet {

/// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads.
/// Work items must write only to their own output slots; exceptions are
/// rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned max_threads = 0) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (max_threads > 0) hw = std::min(hw, max_threads);
    unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(hw, count));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errs(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += n_threads) fn(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace needlet
