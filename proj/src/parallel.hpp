#pragma once

#include <cstdlib>
#include <exception>
#include <algorithm>
#include <thread>
#include <vector>

namespace expwalk::detail {

/// Worker count from EXPWALK_WORKERS (default 1).
inline int worker_count() {
    const char* env = std::getenv("EXPWALK_WORKERS");
    if (!env) return 1;
    const int w = std::atoi(env);
    return w >= 1 ? w : 1;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
/// so results do not depend on the worker count. The first exception thrown
/// (lowest index) is rethrown.
template <class Fn>
void parallel_for(long n, Fn&& fn) {
    const int workers = std::min<long>(worker_count(), std::max<long>(n, 1));
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (long i = w; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace expwalk::detail
