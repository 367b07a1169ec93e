#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qnet {

// Worker count: QNET_THREADS if set, else hardware concurrency.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("QNET_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs fn(i) for i in [0, n). Results must be written to index-addressed
// slots; the schedule is work-stealing by atomic counter, so outputs are
// independent of the thread count.
template <typename Fn>
void parallel_for(long long n, Fn&& fn) {
    unsigned workers = thread_budget();
    if (workers <= 1 || n <= 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    auto run = [&] {
        for (;;) {
            long long i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned count = static_cast<unsigned>(std::min<long long>(workers, n));
    pool.reserve(count - 1);
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

} // namespace qnet
