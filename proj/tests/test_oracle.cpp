#include "doctest.h"
#include "test_util.hpp"

using namespace wtgrid;
using namespace testutil;

TEST_CASE("oracle examples") {
    oracle::OracleSet empty;
    CHECK(oracle::count(empty, RectQuery::full()) == 0);

    oracle::OracleSet anti{{{1, 5, 0}, {5, 1, 0}}};
    CHECK(oracle::dominance(anti, RectQuery::full()).size() == 2);

    oracle::OracleSet s{{{10, 30, 5}, {25, 12, 2}, {40, 5, 7}, {60, 20, 2}}};
    CHECK(oracle::quantile(s, RectQuery::full(), 2) == 2);
    CHECK(oracle::quantile_counting(s, RectQuery::full(), 3) == 5);
    CHECK_THROWS_AS(oracle::quantile(s, RectQuery::full(), 5), Error);
    CHECK(oracle::sum(s, RectQuery::full()) == 16);
    CHECK(*oracle::var(s, {0, 45, 0, 29}) == Rational::make(25, 4));
    CHECK(oracle::group_fold(s, RectQuery::full(), XorGroup{}) == 2);
    CHECK(oracle::group_fold(s, {0, 45, 0, 29}, ModularGroup{7}) == 2);
    CHECK(oracle::majority(s, RectQuery::full(), Fraction::parse("0.4")) == std::vector<ValueCount>{{2, 2}});
    CHECK(oracle::majority(s, RectQuery::full(), Fraction::parse("1/2")).empty());
    CHECK(*oracle::successor(s, RectQuery::full(), 3) == 5);
    CHECK(!oracle::successor(s, RectQuery::full(), 8));
    CHECK(oracle::top_k_frequent(s, RectQuery::full(), 1) == std::vector<ValueCount>{{2, 2}});

    auto ne = oracle::visibility(s, 0, 0, Direction::NE);
    CHECK(ne == std::vector<Point>{{40, 5, 7}, {25, 12, 2}, {10, 30, 5}});
    CHECK(oracle::dominance(s, RectQuery::full()) == std::vector<Point>{{10, 30, 5}, {60, 20, 2}});
}

TEST_CASE("independent strategies agree") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 3000; ++t) {
        uint64_t n = log_uniform(rng, 1, 300), U = 1 + rng() % 64;
        auto ps = random_set(rng, n, U, 1 + rng() % 64);
        auto os = as_oracle(ps);
        auto q = random_rect(rng, U, t % 7);
        uint64_t c = oracle::count(os, q);
        for (uint64_t k = 1; k <= c; k += 1 + c / 16)
            CHECK(oracle::quantile(os, q, k) == oracle::quantile_counting(os, q, k));
        uint64_t k = 1 + rng() % 10;
        CHECK(oracle::top_k_smallest(os, q, k) == oracle::top_k_smallest_selection(os, q, k));
        for (auto a : {"1/2", "1/4", "1/8", "0.34"})
            CHECK(oracle::majority(os, q, Fraction::parse(a)) == oracle::majority_sorted(os, q, Fraction::parse(a)));
        CHECK(oracle::dominance(os, q) == oracle::dominance_quadratic(os, q));
        uint64_t ox = rng() % U, oy = rng() % U;
        for (auto d : {Direction::NE, Direction::NW, Direction::SE, Direction::SW})
            CHECK(oracle::visibility(os, ox, oy, d) == oracle::visibility_quadratic(os, ox, oy, d));
    }
}

TEST_CASE("visibility toward SW is dominance of the lower-left box") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 500; ++t) {
        auto ps = random_set(rng, 1 + rng() % 100, 32, 8);
        auto os = as_oracle(ps);
        uint64_t ox = rng() % 32, oy = rng() % 32;
        CHECK(oracle::visibility(os, ox, oy, Direction::SW) == oracle::dominance(os, {0, ox, 0, oy}));
    }
}

TEST_CASE("dynamic oracle removes the newest point at a location") {
    oracle::DynamicOracle d;
    d.insert({1, 1, 5});
    d.insert({1, 1, 9});
    d.erase(1, 1);
    REQUIRE(d.set().points.size() == 1);
    CHECK(d.set().points[0].w == 5);
    d.update(1, 1, 3);
    CHECK(d.set().points[0].w == 3);
    CHECK_THROWS_AS(d.erase(2, 2), Error);
}

TEST_CASE("fractions") {
    auto f = Fraction::parse("0.34");
    CHECK(f.num == 17);
    CHECK(f.den == 50);
    CHECK(Fraction::parse("1/4").exceeded_by(2, 7));
    CHECK(!Fraction::parse("1/2").exceeded_by(2, 4));
    CHECK_THROWS_AS(Fraction::parse("1.5"), Error);
    CHECK_THROWS_AS(Fraction::parse("x"), Error);
}
