#include <random>

#include "doctest.h"
#include "wtgrid/rmq.hpp"

using namespace wtgrid;

namespace {

uint64_t scan_arg(const std::vector<uint64_t>& v, uint64_t i, uint64_t j, bool maximum) {
    uint64_t best = i;
    for (uint64_t k = i + 1; k <= j; ++k)
        if (maximum ? v[k] > v[best] : v[k] < v[best]) best = k;
    return best;
}

}  // namespace

TEST_CASE("small arrays") {
    std::vector<uint64_t> v{5, 2, 7, 2};
    BpRmq mn(v, false), mx(v, true);
    CHECK(mn.query(0, 3) == 1);
    CHECK(mn.query(2, 3) == 3);
    CHECK(mn.query(0, 0) == 0);
    CHECK(mx.query(0, 3) == 2);
    CHECK(mx.query(0, 1) == 0);
    CHECK_THROWS_AS(mn.query(2, 4), Error);
}

TEST_CASE("random arrays agree with a scan, leftmost on ties") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 300; ++t) {
        uint64_t n = 1 + rng() % (t < 250 ? 300 : 20000);
        uint64_t range = 1 + rng() % (t % 3 == 0 ? 4 : 1000000);
        std::vector<uint64_t> v(n);
        for (auto& x : v) x = rng() % range;
        // sorted runs stress deep stacks
        if (t % 5 == 0) std::sort(v.begin(), v.end());
        if (t % 5 == 1) std::sort(v.rbegin(), v.rend());
        for (bool maximum : {false, true}) {
            BpRmq r(v, maximum);
            for (int k = 0; k < 200; ++k) {
                uint64_t i = rng() % n, j = rng() % n;
                if (i > j) std::swap(i, j);
                CHECK(r.query(i, j) == scan_arg(v, i, j, maximum));
            }
        }
    }
}

TEST_CASE("space is about 2.4 bits per element and survives a round trip") {
    std::mt19937_64 rng(1);
    std::vector<uint64_t> v(1 << 16);
    for (auto& x : v) x = rng() % 1000;
    BpRmq r(v, false);
    CHECK(double(r.bits()) / v.size() <= 2.5);
    ByteWriter w;
    r.save(w);
    ByteReader in(w.str());
    auto s = BpRmq::load(in);
    for (int k = 0; k < 1000; ++k) {
        uint64_t i = rng() % v.size(), j = rng() % v.size();
        if (i > j) std::swap(i, j);
        CHECK(s.query(i, j) == r.query(i, j));
    }
}
