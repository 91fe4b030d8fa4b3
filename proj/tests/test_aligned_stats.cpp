#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wtgrid/aligned_stats.hpp"

using namespace wtgrid;
using namespace testutil;

namespace {

WeightedPointSet sample() {
    WeightedPointSet ps;
    ps.U = 100;
    ps.W = 8;
    ps.points = {{10, 30, 5}, {25, 12, 2}, {40, 5, 7}, {60, 20, 2}};
    return ps;
}

// x-ranks 0..2, y-ranks 0..2 of the sample
const RectQuery kLower{0, 45, 0, 29};

bool close(double a, long double b, double rel) {
    double scale = std::max<double>(1.0, std::fabs(double(b)));
    return std::fabs(a - double(b)) <= rel * scale;
}

}  // namespace

TEST_CASE("sums on the sample") {
    RankGrid g(sample());
    SumAugmentation s(g, 1);
    CHECK(s.sum(RankRect{0, 2, 0, 2}) == 9);
    CHECK(s.sum(RankRect{}) == 0);
    CHECK(s.sum(RectQuery::full()) == 16);
    CHECK(*s.avg(kLower) == Rational::make(9, 2));
    CHECK(*s.avg({10, 10, 30, 30}) == Rational::make(5, 1));
    CHECK(!s.avg({11, 11, 0, 99}));
    CHECK(*s.var(kLower) == Rational::make(25, 4));
    CHECK(*s.var({10, 10, 30, 30}) == Rational::make(0, 1));
    CHECK(close(*s.var_stable(kLower), 6.25L, 1e-9));
    CHECK(!s.var_stable({11, 11, 0, 99}));

    GroupSums<XorGroup> x(s, g);
    CHECK(x.fold(RectQuery::full()) == 2);
    GroupSums<ModularGroup> m7(s, g, ModularGroup{7});
    CHECK(m7.fold(kLower) == 2);
    CHECK(m7.fold({11, 11, 0, 99}) == 0);
}

TEST_CASE("min, max and top-k on the sample") {
    RankGrid g(sample());
    MinMaxAugmentation mm(g, 1);
    auto lo = mm.min(kLower);
    REQUIRE(lo);
    CHECK(lo->value == 2);
    CHECK(lo->point == Point{25, 12, 2});
    CHECK(mm.max(RectQuery::full())->value == 7);
    CHECK(!mm.min({11, 11, 0, 99}));
    auto top = mm.top_k(kLower, 2, false);
    REQUIRE(top.size() == 2);
    CHECK(top[0].value == 2);
    CHECK(top[1].value == 7);
    CHECK(mm.top_k(RectQuery::full(), 10, false).size() == 4);
    CHECK(mm.top_k(RectQuery::full(), 1, false)[0] == *mm.min(RectQuery::full()));
}

TEST_CASE("merging bands") {
    BandSummary a{1, 5, 0}, b{1, 5, 0};
    CHECK(merge_bands(a, b).spread == 0);
    BandSummary c{1, 2, 0}, d{1, 7, 0};
    CHECK(merge_bands(c, d).variance() == doctest::Approx(6.25));
}

TEST_CASE("aligned statistics match the oracle") {
    std::mt19937_64 rng(44);
    for (int t = 0; t < 300; ++t) {
        uint64_t n = log_uniform(rng, 1, 4096), U = 1 + rng() % 65536, W = 1 + rng() % (1 << 20);
        auto ps = random_set(rng, n, U, W);
        RankGrid g(ps);
        uint64_t tt = uint64_t(1) << (rng() % 4);
        SumAugmentation s(g, tt, t % 4 == 3 ? SumAugmentation::Centring::global : SumAugmentation::Centring::per_node);
        MinMaxAugmentation mm(g, tt, t % 2 == 0);
        GroupSums<XorGroup> gx(s, g);
        GroupSums<ModularGroup> g7(s, g, ModularGroup{7});
        auto os = as_oracle(ps);
        for (int k = 0; k < 10; ++k) {
            auto q = random_rect(rng, U, k);
            CHECK(s.sum(q) == oracle::sum(os, q));
            CHECK(s.avg(q) == oracle::avg(os, q));
            CHECK(s.var(q) == oracle::var(os, q));
            auto vs = s.var_stable(q);
            auto vo = oracle::var_two_pass(os, q);
            REQUIRE(vs.has_value() == vo.has_value());
            if (vs) CHECK(close(*vs, *vo, 1e-6));
            CHECK(gx.fold(q) == oracle::group_fold(os, q, XorGroup{}));
            CHECK(g7.fold(q) == oracle::group_fold(os, q, ModularGroup{7}));
            CHECK(mm.min(q) == oracle::min(os, q));
            CHECK(mm.max(q) == oracle::max(os, q));
            uint64_t kk = 1 + rng() % 20;
            CHECK(mm.top_k(q, kk, false) == oracle::top_k_smallest(os, q, kk));
            CHECK(mm.top_k(q, kk, true) == oracle::top_k_largest(os, q, kk));
        }
    }
}

TEST_CASE("top-k queue operations for t = 1") {
    // documented constant: ops <= 4 (log2 n + k (log2 m + log2 k))
    constexpr double kQueueC = 4.0;
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        uint64_t n = log_uniform(rng, 2, 4096);
        auto ps = random_set(rng, n, 1 << 16, 1 << 20);
        RankGrid g(ps);
        MinMaxAugmentation mm(g, 1);
        for (uint64_t k : {1ULL, 8ULL, 100ULL}) {
            TopkStats st;
            auto q = random_rect(rng, 1 << 16, 5);
            mm.top_k(q, k, false, &st);
            double m = double(std::max<uint64_t>(2, mm.distinct()));
            CHECK(double(st.queue_ops) <= kQueueC * (std::log2(double(n)) + k * (std::log2(m) + std::log2(double(k)) + 1)));
        }
    }
}

TEST_CASE("stable variance on large, tightly spread weights") {
    std::mt19937_64 rng(3);
    WeightedPointSet ps;
    ps.U = 1 << 16;
    ps.W = 1 << 21;
    for (int i = 0; i < 4000; ++i) ps.points.push_back({rng() % ps.U, rng() % ps.U, 1000000 + rng() % 11});
    RankGrid g(ps);
    SumAugmentation s(g, 2);
    auto os = as_oracle(ps);
    for (int k = 0; k < 50; ++k) {
        auto q = random_rect(rng, ps.U, 5 + k % 2);
        auto vs = s.var_stable(q);
        auto vo = oracle::var_two_pass(os, q);
        if (vs) CHECK(close(*vs, *vo, 1e-6));
    }
}

TEST_CASE("serial and parallel builds agree byte for byte") {
    std::mt19937_64 rng(10);
    auto ps = random_set(rng, 3000, 1 << 16, 1 << 20);
    RankGrid g(ps);
    ByteWriter a, b, c, d;
    SumAugmentation(g, 2, SumAugmentation::Centring::per_node, false).save(a);
    SumAugmentation(g, 2, SumAugmentation::Centring::per_node, true).save(b);
    MinMaxAugmentation(g, 2, false).save(c);
    MinMaxAugmentation(g, 2, true).save(d);
    CHECK(a.str() == b.str());
    CHECK(c.str() == d.str());
    ByteReader ra(a.str()), rc(c.str());
    auto s = SumAugmentation::load(ra, g);
    auto m = MinMaxAugmentation::load(rc, g);
    auto os = as_oracle(ps);
    for (int k = 0; k < 20; ++k) {
        auto q = random_rect(rng, 1 << 16, k);
        CHECK(s.sum(q) == oracle::sum(os, q));
        CHECK(m.min(q) == oracle::min(os, q));
    }
}

TEST_CASE("larger t shrinks the augmentation") {
    std::mt19937_64 rng(12);
    auto ps = random_set(rng, 1 << 12, 1 << 16, 1 << 20);
    ps.points.clear();
    for (int i = 0; i < (1 << 12); ++i) ps.points.push_back({rng() % ps.U, rng() % ps.U, rng() % ps.W});
    RankGrid g(ps);
    auto s1 = SumAugmentation(g, 1).space(), s8 = SumAugmentation(g, 8).space();
    CHECK(s8.block_sums < s1.block_sums);
    auto m1 = MinMaxAugmentation(g, 1).space(), m8 = MinMaxAugmentation(g, 8).space();
    CHECK(m8.min_structure() < m1.min_structure());
}
