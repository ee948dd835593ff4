#include "kir/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace kir {

namespace {

std::atomic<std::size_t> g_worker_override{0};
thread_local bool tl_inside_parallel = false;

std::size_t default_workers() {
    if (const char* env = std::getenv("KIR_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

}  // namespace

std::size_t worker_count() {
    const std::size_t o = g_worker_override.load(std::memory_order_relaxed);
    return o != 0 ? o : default_workers();
}

void set_worker_count(std::size_t n) {
    g_worker_override.store(n, std::memory_order_relaxed);
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
    if (begin >= end) return;
    const std::size_t count = end - begin;
    std::size_t workers = worker_count();
    if (workers > count) workers = count;

    if (workers <= 1 || tl_inside_parallel) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;

    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi] {
            tl_inside_parallel = true;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
            tl_inside_parallel = false;
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kir
