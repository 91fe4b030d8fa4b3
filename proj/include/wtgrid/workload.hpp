#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "wtgrid/grid.hpp"

// Seeded random point sets and rectangles shared by the tests, the verify
// harness, the benchmarks and the acceptance suite.
namespace wtgrid::workload {

inline uint64_t mix_seed(uint64_t seed, uint64_t i) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline WeightedPointSet random_set(std::mt19937_64& rng, uint64_t n, uint64_t U, uint64_t W) {
    WeightedPointSet ps;
    ps.U = U;
    ps.W = W;
    // small coordinate pools now and then to force ties
    uint64_t xs = rng() % 3 == 0 ? 1 + rng() % 8 : U;
    uint64_t ys = rng() % 3 == 0 ? 1 + rng() % 8 : U;
    uint64_t ws = rng() % 2 == 0 ? 1 + rng() % 6 : W;
    for (uint64_t i = 0; i < n; ++i) {
        uint64_t x = xs == U ? rng() % U : (rng() % xs) * (U / xs);
        uint64_t y = ys == U ? rng() % U : (rng() % ys) * (U / ys);
        uint64_t w = ws == W ? rng() % W : (rng() % ws) * (W / ws);
        ps.points.push_back({x, y, w});
    }
    return ps;
}

inline uint64_t log_uniform(std::mt19937_64& rng, uint64_t lo, uint64_t hi) {
    double a = std::log(double(lo)), b = std::log(double(hi) + 1);
    auto v = static_cast<uint64_t>(std::exp(std::uniform_real_distribution<>(a, b)(rng)));
    return std::clamp(v, lo, hi);
}

constexpr int kRectKinds = 6;

// kind 0 full, 1 empty, 2 point, 3 horizontal line, 4 vertical line,
// otherwise a general rectangle.
inline RectQuery random_rect(std::mt19937_64& rng, uint64_t U, int kind) {
    auto c = [&] { return rng() % U; };
    switch (kind) {
        case 0: return RectQuery::full();
        case 1: {
            uint64_t a = 1 + rng() % (U > 1 ? U - 1 : 1);
            return {a, a - 1, 0, U - 1};
        }
        case 2: {
            uint64_t x = c(), y = c();
            return {x, x, y, y};
        }
        case 3: {
            uint64_t y = c(), a = c(), b = c();
            return {std::min(a, b), std::max(a, b), y, y};
        }
        case 4: {
            uint64_t x = c(), a = c(), b = c();
            return {x, x, std::min(a, b), std::max(a, b)};
        }
        default: {
            uint64_t a = c(), b = c(), d = c(), e = c();
            return {std::min(a, b), std::max(a, b), std::min(d, e), std::max(d, e)};
        }
    }
}

// Like random_rect, but point and line rectangles go through existing
// points so that they are rarely empty.
inline RectQuery anchored_rect(std::mt19937_64& rng, const WeightedPointSet& ps, int kind) {
    if (ps.points.empty() || kind < 2 || kind > 4) return random_rect(rng, ps.U, kind);
    const Point& p = ps.points[rng() % ps.points.size()];
    uint64_t a = rng() % ps.U, b = rng() % ps.U;
    if (kind == 2) return {p.x, p.x, p.y, p.y};
    if (kind == 3) return {std::min({a, b, p.x}), std::max({a, b, p.x}), p.y, p.y};
    return {p.x, p.x, std::min({a, b, p.y}), std::max({a, b, p.y})};
}

}  // namespace wtgrid::workload
