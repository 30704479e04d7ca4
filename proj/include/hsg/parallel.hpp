#pragma once

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <functional>
#include <thread>
#include <vector>

namespace hsg {

inline int default_thread_count() {
    if (const char* env = std::getenv("HSG_THREADS")) {
        const int k = std::atoi(env);
        if (k > 0) return k;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, n).  Work items write to index-addressed slots, so
// results are deterministic regardless of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const int k = std::min<std::size_t>(threads, n);
    pool.reserve(k);
    for (int t = 0; t < k; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace hsg
