#include "fpfv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace fpfv {

namespace {
std::atomic<std::size_t> g_threads{1};
}

void set_thread_count(std::size_t n) { g_threads.store(std::max<std::size_t>(1, n)); }

std::size_t thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(1, n / 1024));
    if (workers <= 1) {
        if (n > 0) body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](std::size_t w) {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        try {
            if (begin < end) body(begin, end);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
        run(0);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
            double s = 0.0;
            for (std::size_t i = b * kReductionBlock; i < end; ++i) s += term(i);
            partial[b] = s;
        }
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double deterministic_sum(std::span<const double> values) {
    return parallel_sum(values.size(), [values](std::size_t i) { return values[i]; });
}

}  // namespace fpfv
