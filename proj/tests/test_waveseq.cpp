#include <random>

#include "doctest.h"
#include "wtgrid/waveseq.hpp"

using namespace wtgrid;

namespace {

WaveletTree make(std::vector<uint64_t> s, uint64_t sigma) { return WaveletTree(s, sigma); }

}  // namespace

TEST_CASE("access, rank and select on a small permutation") {
    auto wt = make({3, 1, 0, 2}, 4);
    CHECK(wt.access(2) == 0);
    CHECK(wt.access(0) == 3);
    CHECK(wt.seq_rank(1, 3) == 1);
    CHECK(wt.seq_rank(1, -1) == 0);
    CHECK(wt.seq_select(0, 1) == 2);
    CHECK_THROWS_AS(wt.seq_select(0, 2), Error);
    CHECK_THROWS_AS(wt.access(4), Error);

    auto one = make({5}, 6);
    CHECK(one.access(0) == 5);
    CHECK(one.seq_select(5, 1) == 0);

    auto same = make({2, 2, 2}, 3);
    CHECK(same.seq_rank(2, 2) == 3);
    CHECK(same.seq_select(2, 3) == 2);
}

TEST_CASE("reduce and unreduce") {
    auto wt = make({3, 1, 0, 2}, 4);
    auto root = wt.root();
    CHECK(wt.bit(root, 0) == 1);
    CHECK(wt.bit(root, 1) == 0);
    CHECK(wt.bit(root, 2) == 0);
    CHECK(wt.bit(root, 3) == 1);
    CHECK(wt.reduce(root, "0", 3) == 1);
    CHECK(wt.reduce(root, "", 2) == 2);
    CHECK(wt.reduce(root, "1", -1) == -1);
    CHECK(wt.unreduce(root, root, 3) == 3);
    CHECK(wt.unreduce(wt.leaf(0), root, 0) == 2);
    for (int64_t i = 0; i < 4; ++i) {
        bool b = wt.bit(root, i);
        auto c = wt.child(root, b);
        CHECK(wt.unreduce(c, root, wt.reduce(root, b ? "1" : "0", i)) == i);
    }
}

TEST_CASE("decompose tiles the symbol range") {
    auto wt = make({3, 1, 0, 2}, 4);
    auto full = wt.decompose(0, 3);
    REQUIRE(full.size() == 1);
    CHECK(full[0] == wt.root());
    auto d = wt.decompose(0, 2);
    REQUIRE(d.size() == 2);
    CHECK(d[0].level == 1);
    CHECK(d[0].label == 0);
    CHECK(d[1].level == 2);
    CHECK(d[1].label == 2);
    auto leaf = wt.decompose(2, 2);
    REQUIRE(leaf.size() == 1);
    CHECK(leaf[0] == wt.leaf(2));
    CHECK_THROWS_AS(wt.decompose(2, 1), Error);

    std::mt19937_64 rng(1);
    for (int t = 0; t < 2000; ++t) {
        uint64_t sigma = 1 + rng() % 1024;
        WaveletTree w(std::vector<uint64_t>{}, sigma);
        uint64_t a = rng() % sigma, b = rng() % sigma;
        if (a > b) std::swap(a, b);
        auto nodes = w.decompose(a, b);
        uint64_t next = a;
        for (auto& v : nodes) {
            CHECK(w.sym_lo(v) == next);
            next = w.sym_hi(v) + 1;
        }
        CHECK(next == b + 1);
        CHECK(nodes.size() <= std::max(1u, 2 * w.depth()));
    }
}

TEST_CASE("random sequences agree with a plain array") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 1000; ++t) {
        uint64_t n = rng() % 4097, sigma = 1 + rng() % 1024;
        std::vector<uint64_t> s(n);
        for (auto& c : s) c = rng() % sigma;
        WaveletTree wt(s, sigma, t % 2 == 1);
        std::vector<uint64_t> cnt(sigma, 0);
        for (uint64_t i = 0; i < n; ++i) {
            CHECK(wt.access(i) == s[i]);
            ++cnt[s[i]];
            if (i % 7 == 0) CHECK(wt.seq_rank(s[i], static_cast<int64_t>(i)) == cnt[s[i]]);
            CHECK(wt.seq_select(s[i], cnt[s[i]]) == static_cast<int64_t>(i));
        }
        uint64_t c = rng() % sigma;
        CHECK(wt.seq_rank(c, static_cast<int64_t>(n) - 1) == cnt[c]);
        if (n > 0) {
            uint64_t x0 = rng() % n, x1 = x0 + rng() % (n - x0 + 1);
            uint64_t y0 = rng() % sigma, y1 = y0 + rng() % (sigma - y0);
            uint64_t want = 0;
            for (uint64_t i = x0; i < x1; ++i) want += s[i] >= y0 && s[i] <= y1;
            CHECK(wt.count_range(x0, x1, y0, y1) == want);
        }
    }
}

TEST_CASE("reduce and unreduce invert along every path") {
    std::mt19937_64 rng(3);
    std::vector<uint64_t> s(500);
    for (auto& c : s) c = rng() % 37;
    WaveletTree wt(s, 37);
    for (uint64_t i = 0; i < s.size(); ++i) {
        std::string path;
        for (unsigned d = 0; d < wt.depth(); ++d) path += ((s[i] >> (wt.depth() - 1 - d)) & 1) ? '1' : '0';
        int64_t at_leaf = wt.reduce(wt.root(), path, static_cast<int64_t>(i));
        CHECK(wt.unreduce(wt.leaf(s[i]), wt.root(), at_leaf) == static_cast<int64_t>(i));
    }
}

TEST_CASE("serial and parallel builds are identical and round trip") {
    std::mt19937_64 rng(4);
    std::vector<uint64_t> s(10000);
    for (auto& c : s) c = rng() % 1000;
    WaveletTree a(s, 1000, false), b(s, 1000, true);
    ByteWriter wa, wb;
    a.save(wa);
    b.save(wb);
    CHECK(wa.str() == wb.str());
    ByteReader r(wa.str());
    auto c = WaveletTree::load(r);
    CHECK(r.done());
    for (uint64_t i = 0; i < s.size(); i += 13) CHECK(c.access(i) == s[i]);
    CHECK(a.bits() >= a.payload_bits());
}

TEST_CASE("empty tree") {
    WaveletTree wt(std::vector<uint64_t>{}, 8);
    CHECK(wt.size() == 0);
    CHECK(wt.seq_rank(3, -1) == 0);
    CHECK(wt.count_range(0, 0, 0, 7) == 0);
    CHECK_THROWS_AS(wt.seq_select(3, 1), Error);
}
