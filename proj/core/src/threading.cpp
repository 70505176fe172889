#include "ccnet/threading.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace ccnet::threading {

namespace {
std::atomic<unsigned> g_max_threads{1};

unsigned resolved_threads() {
    unsigned n = g_max_threads.load(std::memory_order_relaxed);
    if (n == 0) {
        n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
    }
    return n;
}
} // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n, std::memory_order_relaxed); }

unsigned max_threads() { return resolved_threads(); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
    if (begin >= end) return;
    const std::size_t count = end - begin;
    const std::size_t threads =
        std::min<std::size_t>(resolved_threads(), count);
    if (threads <= 1) {
        chunk_fn(begin, end);
        return;
    }
    const std::size_t base = count / threads;
    const std::size_t extra = count % threads;
    std::vector<std::thread> workers;
    workers.reserve(threads - 1);
    std::size_t chunk_begin = begin;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t chunk = base + (t < extra ? 1 : 0);
        const std::size_t chunk_end = chunk_begin + chunk;
        if (t + 1 == threads) {
            chunk_fn(chunk_begin, chunk_end); // run the last chunk inline
        } else {
            workers.emplace_back(
                [&chunk_fn, chunk_begin, chunk_end] { chunk_fn(chunk_begin, chunk_end); });
        }
        chunk_begin = chunk_end;
    }
    for (auto& w : workers) w.join();
}

} // namespace ccnet::threading
