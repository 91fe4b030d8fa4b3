#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wtgrid/dynamic.hpp"

using namespace wtgrid;
using namespace testutil;

namespace {

// wavelet nodes touched by one insert or erase <= C * (log2 U + 1) for each
// y-tree on the path (the grid and every value grid), plus the value path
constexpr double kTouchC = 1.0;

const Direction kDirs[] = {Direction::NE, Direction::NW, Direction::SE, Direction::SW};

}  // namespace

TEST_CASE("dynamic examples") {
    DynamicIndex d(16, 8);
    CHECK(d.grid.count(RectQuery::full()) == 0);
    CHECK(d.grid.report(RectQuery::full()).empty());
    CHECK(!d.grid.min(RectQuery::full()));
    CHECK(!d.values.successor(RectQuery::full(), 0));
    d.insert({3, 1, 5});
    CHECK(d.grid.count(RectQuery::full()) == 1);
    d.erase(3, 1);
    CHECK(d.grid.count(RectQuery::full()) == 0);
    CHECK(d.grid.sum(RectQuery::full()) == 0);
    d.grid.audit();
    d.values.audit();

    // a chain: only the top point dominates
    d.insert({1, 1, 0});
    d.insert({2, 2, 0});
    d.insert({3, 3, 0});
    CHECK(d.grid.dominance(RectQuery::full()) == std::vector<Point>{{3, 3, 0}});
    d.erase(1, 1);
    d.erase(2, 2);
    d.erase(3, 3);

    d.insert({0, 0, 5});
    d.insert({1, 1, 2});
    CHECK(d.grid.sum(RectQuery::full()) == 7);
    CHECK(d.grid.min(RectQuery::full())->value == 2);
    d.erase(1, 1);
    CHECK(d.grid.min(RectQuery::full())->value == 5);
    d.insert({1, 1, 2});
    d.insert({2, 2, 7});
    d.insert({3, 3, 2});
    CHECK(d.values.quantile(RectQuery::full(), 2).value == 2);
    CHECK(d.values.quantile(RectQuery::full(), 3).value == 5);

    DynamicIndex one(16, 8);
    one.insert({4, 4, 3});
    CHECK(one.values.successor(RectQuery::full(), 0) == 3u);
    one.update(4, 4, 6);
    CHECK(one.values.successor(RectQuery::full(), 0) == 6u);
    CHECK(one.grid.max(RectQuery::full())->point == Point{4, 4, 6});
}

TEST_CASE("dynamic errors") {
    DynamicIndex d(16, 8);
    CHECK_THROWS_AS(d.erase(1, 1), Error);
    CHECK_THROWS_AS(d.insert({16, 0, 0}), Error);
    CHECK_THROWS_AS(d.insert({0, 16, 0}), Error);
    CHECK_THROWS_AS(d.insert({0, 0, 8}), Error);
    CHECK(d.grid.size() == 0);
    CHECK(d.values.size() == 0);
    CHECK_THROWS_AS(d.values.quantile(RectQuery::full(), 1), Error);
}

TEST_CASE("weight blocks keep their length rules") {
    std::mt19937_64 rng(91);
    for (uint64_t tau : {1, 2, 5, 16}) {
        WeightBlocks b(tau);
        std::vector<uint64_t> ref;
        for (int k = 0; k < 4000; ++k) {
            bool ins = ref.empty() || rng() % 100 < (k < 2000 ? 65u : 35u);
            if (ins) {
                uint64_t p = rng() % (ref.size() + 1), w = rng() % 1000;
                b.insert(p, w);
                ref.insert(ref.begin() + p, w);
            } else {
                uint64_t p = rng() % ref.size();
                CHECK(b.erase(p) == ref[p]);
                ref.erase(ref.begin() + p);
            }
            if (k % 16 == 0) {
                b.audit();
                CHECK(b.values() == ref);
            }
            if (!ref.empty()) {
                uint64_t x = rng() % ref.size(), y = rng() % ref.size();
                if (x > y) std::swap(x, y);
                ++y;
                RangeAgg a = b.range(x, y);
                auto mn = std::min_element(ref.begin() + x, ref.begin() + y);
                auto mx = std::max_element(ref.begin() + x, ref.begin() + y);
                CHECK(a.count == y - x);
                CHECK(a.min == *mn);
                CHECK(a.min_pos == uint64_t(mn - ref.begin()));
                CHECK(a.max_pos == uint64_t(mx - ref.begin()));
            }
        }
        b.audit();
    }
}

TEST_CASE("dynamic replay matches the multiset oracle after every operation") {
    std::mt19937_64 rng(92);
    for (int script = 0; script < 150; ++script) {
        uint64_t U = 1 + rng() % 4096, W = 1 + rng() % 1024;
        uint64_t len = log_uniform(rng, 1, 2000);
        uint64_t pool = rng() % 2 ? 4 : U;
        DynamicIndex d(U, W, 1 + rng() % 4, std::vector<uint64_t>{2, 4, 16}[rng() % 3]);
        oracle::DynamicOracle os;
        double per_op = (d.values.grid_count() + 1) * (std::ceil(std::log2(double(U))) + 1) +
                        d.values.value_depth() + 1;
        for (uint64_t k = 0; k < len; ++k) {
            const auto& pts = os.set().points;
            UpdateStats st;
            uint64_t op = rng() % 10;
            if (pts.empty() || op < 5) {
                Point p{(rng() % pool) * (U / pool), (rng() % pool) * (U / pool), rng() % W};
                d.insert(p, &st);
                os.insert(p);
            } else if (op < 8) {
                const Point& p = pts[rng() % pts.size()];
                Point gone = d.erase(p.x, p.y, &st);
                CHECK(gone.w == [&] {
                    for (auto it = pts.rbegin(); it != pts.rend(); ++it)
                        if (it->x == p.x && it->y == p.y) return it->w;
                    return uint64_t(0);
                }());
                os.erase(p.x, p.y);
            } else {
                Point p = pts[rng() % pts.size()];
                uint64_t w = rng() % W;
                d.update(p.x, p.y, w, &st);
                os.update(p.x, p.y, w);
            }
            CHECK(double(st.touched) <= kTouchC * per_op * (op >= 8 && !pts.empty() ? 2 : 1));
            if (k % 64 == 0) {
                d.grid.audit();
                d.values.audit();
            }
            const auto& set = os.set();
            auto q = random_rect(rng, U, int(rng() % 8));
            REQUIRE(d.grid.count(q) == oracle::count(set, q));
            CHECK(d.grid.report(q) == oracle::report(set, q));
            CHECK(d.grid.dominance(q) == oracle::dominance(set, q));
            uint64_t ox = rng() % U, oy = rng() % U;
            Direction dir = kDirs[rng() % 4];
            CHECK(d.grid.visibility(ox, oy, dir) == oracle::visibility(set, ox, oy, dir));
            CHECK(d.grid.sum(q) == oracle::sum(set, q));
            CHECK(d.grid.avg(q) == oracle::avg(set, q));
            CHECK(d.grid.var(q) == oracle::var(set, q));
            CHECK(d.grid.min(q) == oracle::min(set, q));
            CHECK(d.grid.max(q) == oracle::max(set, q));
            uint64_t c = oracle::count(set, q);
            if (c) {
                uint64_t j = 1 + rng() % c;
                auto qv = d.values.quantile(q, j);
                CHECK(qv.value == oracle::quantile(set, q, j));
                CHECK(qv.count == oracle::count_value(set, q, qv.value));
            }
            Fraction a = std::vector<Fraction>{{1, 2}, {1, 3}, {1, 10}}[rng() % 3];
            CHECK(d.values.majority(q, a) == oracle::majority(set, q, a));
            uint64_t w = rng() % (W + 1);
            CHECK(d.values.successor(q, w) == oracle::successor(set, q, w));
            CHECK(d.values.predecessor(q, w) == oracle::predecessor(set, q, w));
            uint64_t w1 = rng() % (W + 1);
            CHECK(d.values.count_value_range(q, w, w1) == oracle::count_value_range(set, q, w, w1));
        }
        d.grid.audit();
        d.values.audit();
    }
}

TEST_CASE("dynamic count equals a static rebuild of the snapshot") {
    std::mt19937_64 rng(93);
    DynamicGrid d(1000, 64);
    std::vector<Point> live;
    for (int k = 0; k < 1000; ++k) {
        if (live.empty() || rng() % 3) {
            Point p{rng() % 1000, rng() % 1000, rng() % 64};
            d.insert(p);
            live.push_back(p);
        } else {
            uint64_t i = rng() % live.size();
            // newest at that location goes
            for (uint64_t j = live.size(); j-- > 0;)
                if (live[j].x == live[i].x && live[j].y == live[i].y) {
                    d.erase(live[j].x, live[j].y);
                    live.erase(live.begin() + j);
                    break;
                }
        }
        if (k % 100 == 0) {
            WeightedPointSet ps{live, 1000, 64};
            RankGrid g(ps);
            for (int j = 0; j < 10; ++j) {
                auto q = random_rect(rng, 1000, j);
                CHECK(d.count(q) == g.count(q));
            }
        }
    }
}
