#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wtgrid/bitvec.hpp"
#include "wtgrid/grid.hpp"
#include "wtgrid/levels.hpp"
#include "wtgrid/rmq.hpp"
#include "wtgrid/types.hpp"

namespace wtgrid {

// Count, sum and sum of squared deviations of one band of points.
struct BandSummary {
    uint64_t count = 0;
    uint64_t total = 0;
    double spread = 0;  // sum of (w - mean)^2

    double variance() const { return count == 0 ? 0.0 : spread / double(count); }
};

// Pairwise combination of two disjoint summaries (Chan et al.).
BandSummary merge_bands(const BandSummary& a, const BandSummary& b);

struct SumSpace {
    uint64_t block_sums = 0;
    uint64_t block_squares = 0;
    uint64_t explicit_values = 0;
    uint64_t centred = 0;
};

// Sum, average and variance over rectangles. Each level of the grid's
// wavelet tree is cut into blocks of tau = t * ceil(log2 W) positions whose
// sums (and sums of squares) are kept as unary partial sums. Single weights
// are recovered by walking down to the nearest level that stores them.
class SumAugmentation {
public:
    enum class Centring : uint8_t { per_node = 0, global = 1 };

    SumAugmentation() = default;
    SumAugmentation(const RankGrid& g, uint64_t t, Centring centring = Centring::per_node, bool parallel = false);

    uint64_t t() const { return t_; }
    uint64_t tau() const { return tau_; }
    bool stores_level(unsigned d) const { return d == nav_.depth() || (d > 0 && (nav_.depth() - d) % tau_ == 0); }

    uint64_t sum(const RankRect& r) const;
    uint64_t sum(const RectQuery& q) const { return sum(g_->map_rect(q)); }
    std::optional<Rational> avg(const RectQuery& q) const;
    std::optional<Rational> var(const RectQuery& q) const;
    std::optional<double> var_stable(const RectQuery& q) const;
    // One summary per covering node, left to right in y.
    std::vector<BandSummary> bands(const RankRect& r) const;

    // Weight at position p of level d.
    uint64_t weight_at(unsigned d, uint64_t p) const;

    SumSpace space() const;

    void save(ByteWriter& out) const;
    static SumAugmentation load(ByteReader& in, const RankGrid& g);

private:
    struct Totals {
        uint64_t count = 0;
        uint64_t sum = 0;
        u128 squares = 0;
    };
    Totals totals(const RankRect& r) const;
    uint64_t range_sum(unsigned d, uint64_t a, uint64_t b) const;
    u128 range_squares(unsigned d, uint64_t a, uint64_t b) const;
    u128 range_centred(unsigned d, uint64_t a, uint64_t b) const;
    uint64_t centre(unsigned d, uint64_t p) const;
    void bind(const RankGrid& g) {
        g_ = &g;
        nav_ = PermLevels(g.tree());
    }

    const RankGrid* g_ = nullptr;
    PermLevels nav_;
    uint64_t t_ = 1;
    uint64_t tau_ = 1;
    Centring centring_ = Centring::per_node;
    std::vector<UnaryPartialSums> sums_;
    std::vector<UnaryPartialSums> squares_;
    std::vector<UnaryPartialSums> centred_;
    std::vector<IntVector> values_;   // empty unless stores_level
    std::vector<IntVector> centres_;  // per node, or a single entry
};

// Fold of a finite abelian group over rectangles, from prefix folds sampled
// at the same block boundaries as the sums. Kept in memory only.
template <typename Group>
class GroupSums {
public:
    GroupSums(const SumAugmentation& sums, const RankGrid& g, Group group = {}) : s_(&sums), g_(&g), group_(group) {
        unsigned depth = g.tree().depth();
        uint64_t n = g.size(), tau = sums.tau();
        unsigned width = group.element_bits(width_for(g.weight_bound()));
        if (width == 0) width = 1;
        for (unsigned d = 0; d < depth; ++d) {
            IntVector f((n + tau - 1) / tau + 1, width);
            uint64_t acc = group.identity();
            for (uint64_t p = 0; p < n; ++p) {
                if (p % tau == 0) f.set(p / tau, acc);
                acc = group.op(acc, group.lift(sums.weight_at(d, p)));
            }
            if (n % tau == 0) f.set(n / tau, acc);
            folds_.push_back(std::move(f));
        }
    }

    uint64_t fold(const RectQuery& q) const {
        uint64_t acc = group_.identity();
        RankRect r = g_->map_rect(q);
        if (r.empty()) return acc;
        uint64_t tau = s_->tau();
        g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
            uint64_t a = v.start + lo, b = v.start + hi;
            auto elem = [&](uint64_t p) { acc = group_.op(acc, group_.lift(s_->weight_at(v.level, p))); };
            uint64_t jb = (a + tau - 1) / tau, je = b / tau;
            if (v.level == g_->tree().depth() || jb >= je) {
                for (uint64_t p = a; p < b; ++p) elem(p);
                return;
            }
            for (uint64_t p = a; p < jb * tau; ++p) elem(p);
            const IntVector& f = folds_[v.level];
            acc = group_.op(acc, group_.op(group_.inverse(f[jb]), f[je]));
            for (uint64_t p = je * tau; p < b; ++p) elem(p);
        });
        return acc;
    }

    uint64_t bits() const {
        uint64_t b = 0;
        for (const auto& f : folds_) b += f.bits();
        return b;
    }

private:
    const SumAugmentation* s_;
    const RankGrid* g_;
    Group group_;
    std::vector<IntVector> folds_;
};

struct TopkStats {
    uint64_t queue_ops = 0;
};

struct MinMaxSpace {
    uint64_t rmq_min = 0;
    uint64_t rmq_max = 0;
    uint64_t explicit_ranks = 0;  // sampled levels strictly between root and leaves
    uint64_t leaf_ranks = 0;
    uint64_t marks = 0;

    // what the minimum alone costs beyond the bare leaf values
    uint64_t min_structure() const { return rmq_min + explicit_ranks; }
};

// Range minimum and maximum with a witness, and top-k by weight. Weights are
// handled as ranks among the distinct values. Each level keeps only a range
// minimum (maximum) structure over its blocks of r = t minima; values come
// from ranks stored every t * ceil(log2 m) levels and at the leaves.
class MinMaxAugmentation {
public:
    MinMaxAugmentation() = default;
    MinMaxAugmentation(const RankGrid& g, uint64_t t, bool parallel = false);

    uint64_t t() const { return r_; }
    uint64_t distinct() const { return m_; }
    uint64_t value_rank(uint64_t w) const { return marks_.rank1(w); }
    uint64_t value_of(uint64_t rank) const { return marks_.select1(rank + 1); }
    bool stores_level(unsigned d) const { return d == nav_.depth() || (d > 0 && (nav_.depth() - d) % tau_ == 0); }

    std::optional<WeightedHit> min(const RectQuery& q) const { return extreme(g_->map_rect(q), false); }
    std::optional<WeightedHit> max(const RectQuery& q) const { return extreme(g_->map_rect(q), true); }
    std::optional<WeightedHit> extreme(const RankRect& r, bool maximum) const;
    std::vector<WeightedHit> top_k(const RectQuery& q, uint64_t k, bool largest, TopkStats* stats = nullptr) const;

    uint64_t rank_at(unsigned d, uint64_t p) const;

    MinMaxSpace space() const;

    void save(ByteWriter& out) const;
    static MinMaxAugmentation load(ByteReader& in, const RankGrid& g);

private:
    struct Candidate {
        uint64_t rank;
        unsigned level;
        uint64_t pos;
    };
    // Best element of the range of blocks [j1, j2] at level d.
    Candidate best_in_blocks(unsigned d, uint64_t j1, uint64_t j2, bool maximum) const;
    bool better(uint64_t ra, uint64_t xa, uint64_t rb, uint64_t xb, bool maximum) const {
        if (ra != rb) return maximum ? ra > rb : ra < rb;
        return xa < xb;
    }
    void bind(const RankGrid& g) {
        g_ = &g;
        nav_ = PermLevels(g.tree());
    }

    const RankGrid* g_ = nullptr;
    PermLevels nav_;
    uint64_t r_ = 1;
    uint64_t tau_ = 1;
    uint64_t m_ = 0;
    SparseBits marks_;
    std::vector<BpRmq> rmq_min_;
    std::vector<BpRmq> rmq_max_;
    std::vector<IntVector> ranks_;
};

}  // namespace wtgrid
