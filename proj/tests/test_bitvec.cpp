#include <random>

#include "doctest.h"
#include "wtgrid/bitvec.hpp"

using namespace wtgrid;

namespace {

std::vector<bool> parse(const char* s) {
    std::vector<bool> v;
    for (; *s; ++s) v.push_back(*s == '1');
    return v;
}

void check_against_scan(const std::vector<bool>& v, Encoding enc) {
    RankSelectBits b(v, enc);
    REQUIRE(b.size() == v.size());
    uint64_t c[2] = {0, 0};
    std::vector<int64_t> pos[2];
    for (uint64_t i = 0; i < v.size(); ++i) {
        CHECK(b.access(i) == v[i]);
        c[v[i]]++;
        pos[v[i]].push_back(static_cast<int64_t>(i));
        CHECK(b.rank(true, static_cast<int64_t>(i)) == c[1]);
        CHECK(b.rank(false, static_cast<int64_t>(i)) == c[0]);
        // select∘rank lands on the last occurrence at or before i
        CHECK(b.select(v[i], b.rank(v[i], static_cast<int64_t>(i))) == static_cast<int64_t>(i));
    }
    for (int bit = 0; bit < 2; ++bit) {
        CHECK(b.count(bit) == pos[bit].size());
        for (uint64_t k = 1; k <= pos[bit].size(); ++k) {
            int64_t s = b.select(bit, k);
            CHECK(s == pos[bit][k - 1]);
            CHECK(b.rank(bit, s) == k);
        }
        CHECK_THROWS_AS(b.select(bit, pos[bit].size() + 1), Error);
    }
}

}  // namespace

TEST_CASE("rank and select on 0110") {
    for (auto enc : {Encoding::plain, Encoding::sparse}) {
        RankSelectBits b(parse("0110"), enc);
        CHECK(b.rank(1, 2) == 2);
        CHECK(b.rank(0, 3) == 2);
        CHECK(b.rank(0, -1) == 0);
        CHECK(b.rank(1, -1) == 0);
        CHECK(b.select(1, 2) == 2);
        CHECK(b.select(0, 2) == 3);
        CHECK(b.select(0, 0) == -1);
        CHECK(b.select(1, 0) == -1);
        CHECK_THROWS_AS(b.rank(1, 4), Error);
        CHECK_THROWS_AS(b.select(1, 3), Error);
    }
}

TEST_CASE("random sequences agree with a linear scan") {
    std::mt19937_64 rng(7);
    int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        uint64_t len = 1 + rng() % 4096;
        double dens = 0.01 + 0.98 * std::uniform_real_distribution<>(0, 1)(rng);
        std::bernoulli_distribution coin(dens);
        std::vector<bool> v(len);
        for (uint64_t i = 0; i < len; ++i) v[i] = coin(rng);
        check_against_scan(v, t % 2 ? Encoding::sparse : Encoding::plain);
    }
}

TEST_CASE("long plain bitmap crosses select samples") {
    std::mt19937_64 rng(11);
    for (double dens : {0.001, 0.5, 0.999}) {
        std::bernoulli_distribution coin(dens);
        std::vector<bool> v(200000);
        for (auto&& x : v) x = coin(rng);
        check_against_scan(v, Encoding::plain);
    }
}

TEST_CASE("serialization round trip") {
    std::mt19937_64 rng(3);
    std::vector<bool> v(5000);
    for (auto&& x : v) x = rng() % 5 == 0;
    for (auto enc : {Encoding::plain, Encoding::sparse}) {
        RankSelectBits b(v, enc);
        ByteWriter w;
        b.save(w);
        ByteReader r(w.str());
        auto c = RankSelectBits::load(r);
        CHECK(r.done());
        CHECK(c.encoding() == enc);
        for (uint64_t i = 0; i < v.size(); i += 37) CHECK(c.rank(1, i) == b.rank(1, i));
        std::string cut = w.str().substr(0, w.size() - 3);
        ByteReader r2(cut);
        CHECK_THROWS_AS(RankSelectBits::load(r2), Error);
    }
}

TEST_CASE("unary partial sums") {
    std::vector<uint64_t> v{5, 2, 7, 2};
    UnaryPartialSums ps(v);
    CHECK(ps.prefix_sum(2) == 14);
    CHECK(ps.prefix_sum(-1) == 0);
    CHECK(ps.prefix_sum(3) == 16);
    CHECK(ps.range_sum(1, 3) == 9);
    CHECK_THROWS_AS(ps.prefix_sum(4), Error);

    std::vector<uint64_t> z{0, 0, 0};
    CHECK(UnaryPartialSums(z).prefix_sum(2) == 0);

    std::mt19937_64 rng(5);
    for (uint64_t vmax : {2ULL, 256ULL, 1ULL << 20}) {
        std::vector<uint64_t> vals(3000);
        for (auto& x : vals) x = rng() % vmax;
        UnaryPartialSums p(vals);
        uint64_t acc = 0;
        for (uint64_t i = 0; i < vals.size(); ++i) {
            acc += vals[i];
            CHECK(p.prefix_sum(static_cast<int64_t>(i)) == acc);
        }
    }
}

TEST_CASE("unary expansion limit is enforced") {
    std::vector<uint64_t> v{UnaryPartialSums::kMaxExpansion, 1};
    CHECK_THROWS_AS(UnaryPartialSums{v}, Error);
}

TEST_CASE("sparse encoding space stays near the entropy bound") {
    // constant pinned here: measured bits <= 1.3 * (m log2(u/m) + 2m)
    constexpr double kSlack = 1.3;
    std::mt19937_64 rng(9);
    for (uint64_t u : {1ULL << 14, 1ULL << 18, 1ULL << 22}) {
        for (uint64_t ratio : {8ULL, 13ULL, 64ULL, 1000ULL}) {
            uint64_t m = u / ratio;
            if (m < 512) continue;  // fixed directory words dominate below this
            std::vector<uint64_t> pos;
            std::vector<bool> seen(u);
            while (pos.size() < m) {
                uint64_t p = rng() % u;
                if (!seen[p]) {
                    seen[p] = true;
                    pos.push_back(p);
                }
            }
            std::sort(pos.begin(), pos.end());
            SparseBits s(pos, u);
            double bound = m * std::log2(double(u) / m) + 2.0 * m;
            CHECK(double(s.bits()) <= kSlack * bound);
            for (uint64_t k = 1; k <= m; k += 97) CHECK(s.select1(k) == pos[k - 1]);
        }
    }
}
