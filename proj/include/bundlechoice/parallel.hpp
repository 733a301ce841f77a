#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bundlechoice {

// Parallelism cap: min(hardware, BUNDLECHOICE_THREADS if set).
inline int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("BUNDLECHOICE_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

// Runs body(i) for i in [0, n). Each index owns its outputs, so results are
// independent of the thread count.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    int threads = std::min(max_threads(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace bundlechoice
