#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace juliacert::parallel {

inline std::atomic<int>& worker_count_slot() {
    static std::atomic<int> w{1};
    return w;
}

inline void set_workers(int n) { worker_count_slot().store(n < 1 ? 1 : n); }
inline int workers() { return worker_count_slot().load(); }

/// Runs f(i) for i in [0, n). Tasks must be pure or write only to their own
/// index; results are then identical for any worker count.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    int w = workers();
    if (w <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto run = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                f(i);
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> threads;
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(w), n);
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) threads.emplace_back(run);
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace juliacert::parallel
