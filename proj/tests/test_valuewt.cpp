#include <cmath>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "wtgrid/valuewt.hpp"

using namespace wtgrid;
using namespace testutil;

namespace {

WeightedPointSet sample() {
    WeightedPointSet ps;
    ps.U = 4;
    ps.W = 8;
    ps.points = {{0, 3, 5}, {1, 1, 2}, {2, 0, 7}, {3, 2, 2}};
    return ps;
}

// top-k frequent probes <= C * 4 / alpha_k
constexpr double kProbeC = 1.0;
// quantile grid counts <= C * ell * ceil(log2 m / log2 ell)
constexpr double kQuantileC = 2.0;

struct Built {
    RankGrid g;
    MinMaxAugmentation mm;
    ValueWaveletTree vt;
    Built(const WeightedPointSet& ps, uint64_t ell) : g(ps), mm(g, 1), vt(g, mm, ell) {}
};

}  // namespace

TEST_CASE("value tree queries on the sample") {
    for (uint64_t ell : {2, 4, 16}) {
        Built b(sample(), ell);
        auto full = RectQuery::full();
        CHECK(b.vt.quantile(full, 1).value == 2);
        CHECK(b.vt.quantile(full, 1).count == 2);
        CHECK(b.vt.quantile(full, 2).value == 2);
        CHECK(b.vt.quantile(full, 3).value == 5);
        CHECK(b.vt.quantile(full, 4).value == 7);
        CHECK_THROWS_AS(b.vt.quantile(full, 0), Error);
        CHECK_THROWS_AS(b.vt.quantile(full, 5), Error);
        CHECK_THROWS_AS(b.vt.quantile({3, 2, 0, 3}, 1), Error);
        CHECK(b.vt.count_value_range(full, 2, 5) == 3);
        CHECK(b.vt.count_value_range(full, 0, 7) == 4);
        CHECK(b.vt.count_value_range(full, 5, 2) == 0);
        CHECK(b.vt.count_value_range(full, 3, 4) == 0);
        CHECK(b.vt.successor(full, 3) == 5u);
        CHECK(b.vt.successor(full, 5) == 5u);
        CHECK(!b.vt.successor(full, 8));
        CHECK(b.vt.predecessor(full, 6) == 5u);
        CHECK(!b.vt.predecessor(full, 1));
        auto m = b.vt.majority(full, Fraction{2, 5});
        REQUIRE(m.size() == 1);
        CHECK(m[0] == ValueCount{2, 2});
        CHECK(b.vt.majority(full, Fraction{1, 2}).empty());
        CHECK(b.vt.majority({1, 3, 0, 3}, Fraction{9, 10}).empty());
        auto two = b.vt.majority({0, 3, 1, 2}, Fraction{9, 10});
        REQUIRE(two.size() == 1);
        CHECK(two[0] == ValueCount{2, 2});
        auto top = b.vt.top_k_frequent(full, 1);
        REQUIRE(top.size() == 1);
        CHECK(top[0] == ValueCount{2, 2});
        CHECK(b.vt.top_k_frequent(full, 10).size() == 3);
        CHECK(b.vt.top_k_frequent({0, 2, 0, 3}, 2) == std::vector<ValueCount>{{2, 1}, {5, 1}});
        CHECK(*b.vt.mode(full) == ValueCount{2, 2});
    }
}

TEST_CASE("quantile agrees with sorting for every k") {
    std::mt19937_64 rng(71);
    for (int it = 0; it < 1500; ++it) {
        uint64_t n = log_uniform(rng, 1, 2048), U = 1 + rng() % 4096, W = 1 + rng() % 65536;
        auto ps = random_set(rng, n, U, W);
        uint64_t ell = std::vector<uint64_t>{2, 4, 16}[rng() % 3];
        Built b(ps, ell);
        auto os = as_oracle(ps);
        double levels = std::ceil(std::max(1.0, std::log2(double(b.mm.distinct()))) / std::log2(double(ell)));
        for (int k = 0; k < 4; ++k) {
            auto q = random_rect(rng, U, k == 3 ? 0 : 5);
            uint64_t c = oracle::count(os, q), prev = 0;
            for (uint64_t j = 1; j <= c; j += 1 + c / 64) {
                ValueStats st;
                auto r = b.vt.quantile(q, j, &st);
                REQUIRE(r.value == oracle::quantile(os, q, j));
                CHECK(r.count == oracle::count_value(os, q, r.value));
                CHECK(r.value >= prev);
                prev = r.value;
                CHECK(double(st.grid_counts) <= kQuantileC * ell * levels + 1);
            }
            if (c > 0) CHECK(*b.vt.successor(q, 0) == b.vt.quantile(q, 1).value);
        }
    }
}

TEST_CASE("value range counts, successor and predecessor match scans") {
    std::mt19937_64 rng(72);
    for (int it = 0; it < 800; ++it) {
        uint64_t n = log_uniform(rng, 1, 2048), U = 1 + rng() % 4096, W = 1 + rng() % 65536;
        auto ps = random_set(rng, n, U, W);
        Built b(ps, std::vector<uint64_t>{2, 4, 16}[rng() % 3]);
        auto os = as_oracle(ps);
        for (int k = 0; k < 8; ++k) {
            auto q = random_rect(rng, U, k);
            uint64_t w0 = rng() % (W + 2), w1 = rng() % (W + 2);
            if (!ps.points.empty() && rng() % 2) w0 = ps.points[rng() % n].w;
            CHECK(b.vt.count_value_range(q, w0, w1) == oracle::count_value_range(os, q, w0, w1));
            CHECK(b.vt.successor(q, w0) == oracle::successor(os, q, w0));
            CHECK(b.vt.predecessor(q, w0) == oracle::predecessor(os, q, w0));
        }
    }
}

TEST_CASE("variable majority matches the oracle") {
    std::mt19937_64 rng(73);
    const Fraction alphas[] = {{3, 5}, {17, 50}, {11, 100}, {1, 2}, {1, 8}};
    for (int it = 0; it < 800; ++it) {
        uint64_t n = log_uniform(rng, 1, 2048), U = 1 + rng() % 4096, W = 1 + rng() % 64;
        auto ps = random_set(rng, n, U, W);
        Built b(ps, std::vector<uint64_t>{2, 4, 16}[rng() % 3]);
        auto os = as_oracle(ps);
        for (int k = 0; k < 8; ++k) {
            auto q = random_rect(rng, U, k);
            Fraction a = alphas[rng() % 5];
            ValueStats st;
            auto got = b.vt.majority(q, a, &st);
            REQUIRE(got == oracle::majority(os, q, a));
            for (const auto& vc : got) CHECK(vc.count == oracle::count_value(os, q, vc.value));
            CHECK(st.probes <= (a.den + a.num - 1) / a.num + 1);
        }
    }
}

TEST_CASE("probe positions hit every heavy value") {
    // a run longer than alpha * c placed anywhere in 1..c contains a probe
    for (uint64_t c = 1; c <= 60; ++c)
        for (uint64_t den = 2; den <= 9; ++den) {
            Fraction a{1, den};
            std::vector<uint64_t> probes;
            for (uint64_t i = 1; (i * c + den - 1) / den <= c; ++i) probes.push_back((i * c + den - 1) / den);
            uint64_t f = c / den + 1;
            for (uint64_t start = 1; start + f - 1 <= c; ++start) {
                CHECK(a.exceeded_by(f, c));
                bool hit = std::any_of(probes.begin(), probes.end(),
                                       [&](uint64_t p) { return start <= p && p < start + f; });
                CHECK(hit);
            }
        }
}

TEST_CASE("top-k frequent and mode match the oracle") {
    std::mt19937_64 rng(74);
    for (int it = 0; it < 800; ++it) {
        uint64_t n = log_uniform(rng, 1, 2048), U = 1 + rng() % 4096, W = 1 + rng() % 200;
        auto ps = random_set(rng, n, U, W);
        Built b(ps, std::vector<uint64_t>{2, 4, 16}[rng() % 3]);
        auto os = as_oracle(ps);
        for (int j = 0; j < 8; ++j) {
            auto q = random_rect(rng, U, j);
            uint64_t k = 1 + rng() % 12;
            ValueStats st;
            auto got = b.vt.top_k_frequent(q, k, &st);
            REQUIRE(got == oracle::top_k_frequent(os, q, k));
            CHECK(b.vt.mode(q) == oracle::mode(os, q));
            if (!got.empty()) {
                double c = double(oracle::count(os, q)), alpha_k = double(got.back().count) / c;
                CHECK(double(st.probes) <= kProbeC * 4.0 / alpha_k);
            }
        }
    }
}

TEST_CASE("space stays near n log n per sampled level") {
    std::mt19937_64 rng(75);
    for (uint64_t ell : {2, 4, 16}) {
        uint64_t n = 1 << 12;
        auto ps = random_set(rng, n, 1 << 16, 1 << 20);
        Built b(ps, ell);
        double m = double(b.mm.distinct());
        double per_point = double(b.vt.bits()) / n;
        double bound = std::log2(double(n)) * std::ceil(std::log2(m) / std::log2(double(ell))) + 8 * std::log2(m);
        CHECK(per_point <= bound);
    }
}

TEST_CASE("serial and parallel builds agree byte for byte") {
    std::mt19937_64 rng(76);
    auto ps = random_set(rng, 3000, 1 << 16, 1 << 12);
    RankGrid g(ps);
    MinMaxAugmentation mm(g, 1);
    ByteWriter a, c;
    ValueWaveletTree(g, mm, 4, false).save(a);
    ValueWaveletTree(g, mm, 4, true).save(c);
    CHECK(a.str() == c.str());
    ByteReader in(a.str());
    auto vt = ValueWaveletTree::load(in, g, mm);
    CHECK(in.done());
    auto os = as_oracle(ps);
    for (int k = 0; k < 30; ++k) {
        auto q = random_rect(rng, 1 << 16, k);
        uint64_t cnt = oracle::count(os, q);
        if (cnt) CHECK(vt.quantile(q, 1 + cnt / 2).value == oracle::quantile(os, q, 1 + cnt / 2));
    }
}
