#include "hjgraph/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace hjgraph::parallel {
namespace {

std::atomic<int> g_threads{1};

// Below this many items per worker the spawn cost dominates.
constexpr std::size_t kMinChunk = 256;

double pairwise_sum_impl(const double* data, std::size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += data[k];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

}  // namespace

void set_threads(int count) { g_threads.store(std::max(1, count)); }

int threads() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const auto max_workers = std::max<std::size_t>(1, n / kMinChunk);
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads()), max_workers);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    body(0, std::min(n, chunk));
}

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

}  // namespace hjgraph::parallel
