#include "coreset/parallel.hpp"

#include <atomic>

namespace coreset {

namespace {

unsigned default_threads() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<unsigned> g_threads{default_threads()};

}  // namespace

void set_thread_count(unsigned threads) {
    g_threads.store(threads == 0 ? default_threads() : threads);
}

unsigned thread_count() noexcept {
    return g_threads.load();
}

namespace detail {
bool& inside_parallel_region() noexcept {
    thread_local bool inside = false;
    return inside;
}
}  // namespace detail

}  // namespace coreset
