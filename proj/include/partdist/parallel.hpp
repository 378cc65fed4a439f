#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace partdist {

// Runs blocks 0..block_count-1 exactly once each across up to `workers`
// threads.  Callees store per-block results indexed by block; the caller
// merges them in block order afterwards, so reductions stay deterministic
// for any worker count.
inline void run_blocks(std::size_t block_count, int workers,
                       const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || block_count <= 1) {
        for (std::size_t b = 0; b < block_count; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto pull = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= block_count) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    const std::size_t thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(workers), block_count);
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(pull);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace partdist
