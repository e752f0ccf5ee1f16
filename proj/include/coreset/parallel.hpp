#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace coreset {

/// Worker count used by parallel_for. Defaults to hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count() noexcept;

namespace detail {
bool& inside_parallel_region() noexcept;
}

/// Calls body(begin, end) over disjoint chunks of [0, n). Chunks are
/// contiguous and each index is visited exactly once, so callers that only
/// write to slot i from iteration i get results independent of the thread
/// count. Nested calls run inline on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t grain = 2048) {
    if (n == 0) {
        return;
    }
    const unsigned threads = thread_count();
    const std::size_t chunks = std::min<std::size_t>(threads, (n + grain - 1) / grain);
    if (chunks <= 1 || detail::inside_parallel_region()) {
        body(std::size_t{0}, n);
        return;
    }

    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    const std::size_t step = (n + chunks - 1) / chunks;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = c * step;
        const std::size_t end = std::min(n, begin + step);
        pool.emplace_back([&, c, begin, end] {
            detail::inside_parallel_region() = true;
            try {
                if (begin < end) {
                    body(begin, end);
                }
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// One task per index; for coarse independent jobs (restarts, workers).
template <typename Task>
void parallel_tasks(std::size_t n, Task&& task) {
    parallel_for(
        n,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                task(i);
            }
        },
        1);
}

}  // namespace coreset
