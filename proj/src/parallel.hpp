#ifndef OSAQ_SRC_PARALLEL_HPP
#define OSAQ_SRC_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace osaq::detail {

// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware count). Callers make
// results order-independent by writing to index-addressed slots.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
    if (jobs <= 0)
        jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1)
        jobs = 1;
    if (jobs > n)
        jobs = n;
    if (jobs <= 1) {
        for (int idx = 0; idx < n; ++idx)
            fn(idx);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            try {
                for (int idx = next.fetch_add(1); idx < n; idx = next.fetch_add(1))
                    fn(idx);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace osaq::detail

#endif
