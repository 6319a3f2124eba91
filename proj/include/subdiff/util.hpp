#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace subdiff {

/// Worker count for mode-parallel loops: SUBDIFF_WORKERS if set and valid,
/// otherwise the hardware concurrency. This environment variable is the
/// only knob the library reads from the environment.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SUBDIFF_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

/// Run fn(i) for i in [0, n) over a fixed block partition.
///
/// Each index is processed exactly once by exactly one worker and all
/// workers are joined before returning, so results are identical to the
/// serial loop as long as the bodies write disjoint state - which is how
/// every caller in this library uses it (one sine mode per index).
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const unsigned workers = std::min<unsigned>(worker_count(), n > 0 ? static_cast<unsigned>(n) : 1u);
    if (n <= 0) return;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + static_cast<int>(workers) - 1) / static_cast<int>(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const int lo = static_cast<int>(w) * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

namespace detail {

/// splitmix64: tiny counter-based generator used only to make synthetic
/// noise reproducible across platforms (std::normal_distribution is not
/// pinned by the standard, so it cannot give byte-stable outputs).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Standard normal deviate addressed by (seed, node index): the same triple
/// always produces the same value, independent of evaluation order.
inline double gaussian_at(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = detail::splitmix64(seed ^ (0x517cc1b727220a95ULL + index * 2654435761ULL));
    double u1 = detail::uniform01(detail::splitmix64(key));
    const double u2 = detail::uniform01(detail::splitmix64(key + 0x632be59bd9b4e019ULL));
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace subdiff
