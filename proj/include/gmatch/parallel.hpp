#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gmatch {

// Default worker count: GMATCH_JOBS env var if set, else the hardware count.
inline int default_jobs() {
    if (const char* env = std::getenv("GMATCH_JOBS")) {
        int j = std::atoi(env);
        if (j >= 1) return j;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count) on a small worker pool. Tasks must write only
// to their own slots; the first exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(long long count, int jobs, Fn&& fn) {
    if (count <= 0) return;
    if (jobs <= 1 || count == 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const long long i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    const int workers = static_cast<int>(std::min<long long>(jobs, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace gmatch
