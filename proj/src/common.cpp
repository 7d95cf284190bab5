#include "volpot/common.hpp"

#include <algorithm>
#include <atomic>

namespace volpot {

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double L2 = ab.norm2();
    if (L2 == 0.0) return dist(p, a);
    double t = std::clamp((p - a).dot(ab) / L2, 0.0, 1.0);
    return dist(p, a + t * ab);
}

static int g_threads = 0;

void set_thread_count(int n) { g_threads = n < 0 ? 0 : n; }

int thread_count() {
    if (g_threads > 0) return g_threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    int nt = std::min<std::int64_t>(thread_count(), n);
    if (nt <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next(0);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::int64_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

void parallel_chunks(std::int64_t n, std::int64_t chunk,
                     const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (chunk < 1) chunk = 1;
    std::int64_t njobs = (n + chunk - 1) / chunk;
    parallel_for(njobs, [&](std::int64_t j) {
        std::int64_t b = j * chunk;
        fn(b, std::min(n, b + chunk));
    });
}

}  // namespace volpot
