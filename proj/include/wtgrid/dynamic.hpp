#pragma once

#include <compare>
#include <cstdint>
#include <ext/pb_ds/assoc_container.hpp>
#include <ext/pb_ds/tree_policy.hpp>
#include <optional>
#include <vector>

#include "wtgrid/dynbits.hpp"
#include "wtgrid/geom.hpp"
#include "wtgrid/grid.hpp"
#include "wtgrid/types.hpp"
#include "wtgrid/waveseq.hpp"

namespace wtgrid {

// Levelwise wavelet tree over [0, sigma) whose level bitmaps accept
// insertions and deletions. Same navigation interface as WaveletTree.
class DynamicWavelet {
public:
    DynamicWavelet() = default;
    explicit DynamicWavelet(uint64_t sigma);

    uint64_t size() const { return n_; }
    uint64_t sigma() const { return sigma_; }
    unsigned depth() const { return depth_; }

    WtNode root() const { return {0, 0, 0, n_}; }
    bool is_leaf(const WtNode& v) const { return v.level == depth_; }
    WtNode child(const WtNode& v, bool b) const {
        uint64_t z = local_rank(v, false, v.size);
        if (!b) return {v.level + 1, v.label << 1, v.start, z};
        return {v.level + 1, (v.label << 1) | 1, v.start + z, v.size - z};
    }
    uint64_t sym_lo(const WtNode& v) const { return v.label << (depth_ - v.level); }
    uint64_t sym_hi(const WtNode& v) const {
        uint64_t hi = ((v.label + 1) << (depth_ - v.level)) - 1;
        return hi < sigma_ ? hi : sigma_ - 1;
    }
    uint64_t local_rank(const WtNode& v, bool b, uint64_t i) const {
        const auto& L = levels_[v.level];
        uint64_t r = L.rank1(v.start + i) - L.rank1(v.start);
        return b ? r : i - r;
    }
    uint64_t local_select(const WtNode& v, bool b, uint64_t k) const {
        const auto& L = levels_[v.level];
        uint64_t before = b ? L.rank1(v.start) : L.rank0(v.start);
        return L.select(b, before + k) - v.start;
    }
    // Position of the i-th element of B(v) at the root.
    uint64_t to_root(const WtNode& v, uint64_t i) const;

    uint64_t access(uint64_t i) const;
    // Inserts symbol c at root position i; returns its position on every
    // level 0..depth (the last one among the leaves).
    std::vector<uint64_t> insert(uint64_t i, uint64_t c);
    // Removes root position i; returns its symbol and level positions.
    std::pair<uint64_t, std::vector<uint64_t>> erase(uint64_t i);

    template <typename Fn>
    void for_each_cover(uint64_t x0, uint64_t x1, uint64_t y0, uint64_t y1, Fn&& fn) const {
        if (x0 >= x1 || y0 > y1 || n_ == 0) return;
        cover_rec(root(), x0, x1, y0, y1, fn);
    }
    uint64_t count_range(uint64_t x0, uint64_t x1, uint64_t y0, uint64_t y1) const;

    const DynamicBits& level(unsigned d) const { return levels_[d]; }
    uint64_t bits() const;
    void audit() const;

private:
    template <typename Fn>
    void cover_rec(const WtNode& v, uint64_t lo, uint64_t hi, uint64_t y0, uint64_t y1, Fn& fn) const {
        if (lo >= hi) return;
        uint64_t a = sym_lo(v), b = sym_hi(v);
        if (b < y0 || a > y1) return;
        if (y0 <= a && b <= y1) {
            fn(v, lo, hi);
            return;
        }
        for (bool bit : {false, true}) cover_rec(child(v, bit), local_rank(v, bit, lo), local_rank(v, bit, hi), y0, y1, fn);
    }

    uint64_t sigma_ = 1;
    uint64_t n_ = 0;
    unsigned depth_ = 0;
    std::vector<DynamicBits> levels_;
};

// Range aggregate over one level's weights. Leftmost positions of the
// minimum and maximum are kept so witnesses follow the level order.
struct RangeAgg {
    uint64_t count = 0;
    uint64_t sum = 0;
    uint64_t squares = 0;
    uint64_t min = 0, max = 0;
    uint64_t min_pos = 0, max_pos = 0;

    void add(const RangeAgg& o);
};

// Weights of one level cut into blocks of variable length. Blocks hold at
// most 2 tau values and any two neighbours hold at least tau together;
// repairs create or drop empty blocks and move single values between
// neighbours. A treap over the blocks keeps subtree aggregates.
class WeightBlocks {
public:
    WeightBlocks() = default;
    explicit WeightBlocks(uint64_t tau) : tau_(tau) {}

    uint64_t size() const { return root_ < 0 ? 0 : pool_[root_].sub.count; }
    uint64_t blocks() const { return root_ < 0 ? 0 : pool_[root_].blocks; }
    uint64_t tau() const { return tau_; }

    uint64_t get(uint64_t pos) const;
    RangeAgg range(uint64_t a, uint64_t b) const;
    void insert(uint64_t pos, uint64_t w);
    uint64_t erase(uint64_t pos);

    std::vector<uint64_t> values() const;
    std::vector<uint64_t> block_lengths() const;
    uint64_t bits() const;
    void audit() const;

private:
    struct Node {
        std::vector<uint64_t> vals;
        RangeAgg own, sub;
        uint64_t blocks = 1;
        uint32_t pri = 0;
        int32_t l = -1, r = -1;
    };

    int32_t make_node();
    void pull(int32_t t);
    void split(int32_t t, uint64_t k, int32_t& a, int32_t& b);
    int32_t merge(int32_t a, int32_t b);
    // node of block k and the path to it
    int32_t block_path(uint64_t k, std::vector<int32_t>& path) const;
    void touch(int32_t t, const std::vector<int32_t>& path);
    void insert_block(uint64_t k);
    void remove_block(uint64_t k);
    // moves one value across the boundary between blocks k and k + 1
    void move_right(uint64_t k);
    void move_left(uint64_t k);
    void repair_pair(uint64_t k);
    RangeAgg range_rec(int32_t t, uint64_t a, uint64_t b, uint64_t base) const;

    uint64_t tau_ = 1;
    std::vector<Node> pool_;
    std::vector<int32_t> free_;
    int32_t root_ = -1;
    uint64_t rng_ = 0x2545f4914f6cdd1dULL;
};

struct PointKey {
    uint64_t x, y, seq;
    auto operator<=>(const PointKey&) const = default;
};

// Points by (x, y, insertion sequence) with order statistics; the mapped
// value is the weight.
class PointOrder {
public:
    using Tree = __gnu_pbds::tree<PointKey, uint64_t, std::less<PointKey>, __gnu_pbds::rb_tree_tag,
                                  __gnu_pbds::tree_order_statistics_node_update>;

    uint64_t size() const { return tree_.size(); }
    uint64_t insert(const PointKey& k, uint64_t w);
    // newest point at (x, y)
    std::optional<std::pair<PointKey, uint64_t>> newest(uint64_t x, uint64_t y) const;
    uint64_t position(const PointKey& k) const { return tree_.order_of_key(k); }
    void erase(const PointKey& k) { tree_.erase(k); }
    std::pair<PointKey, uint64_t> at(uint64_t pos) const {
        auto it = tree_.find_by_order(pos);
        return {it->first, it->second};
    }
    // root positions [lo, hi) of x in [x0, x1]
    std::pair<uint64_t, uint64_t> x_range(uint64_t x0, uint64_t x1) const;
    std::vector<std::pair<PointKey, uint64_t>> all() const;

private:
    Tree tree_;
};

struct UpdateStats {
    uint64_t touched = 0;  // wavelet nodes on the update paths
};

// Dynamic grid over a fixed U x U universe: a wavelet tree of depth
// ceil(log2 U) over y with points at the root in (x, y, sequence) order,
// plus the weight blocks of every level. Deleting or updating (x, y) acts on
// the newest point there.
class DynamicGrid {
public:
    DynamicGrid(uint64_t U, uint64_t W, uint64_t t = 1);

    uint64_t size() const { return order_.size(); }
    uint64_t universe() const { return U_; }
    uint64_t weight_bound() const { return W_; }

    void insert(const Point& p, UpdateStats* stats = nullptr);
    Point erase(uint64_t x, uint64_t y, UpdateStats* stats = nullptr);
    void update(uint64_t x, uint64_t y, uint64_t w, UpdateStats* stats = nullptr);

    uint64_t count(const RectQuery& q) const;
    std::vector<Point> report(const RectQuery& q) const;
    std::vector<Point> dominance(const RectQuery& q, GeomStats* stats = nullptr) const;
    std::vector<Point> visibility(uint64_t ox, uint64_t oy, Direction dir, GeomStats* stats = nullptr) const;
    uint64_t sum(const RectQuery& q) const { return totals(q).sum; }
    std::optional<Rational> avg(const RectQuery& q) const;
    std::optional<Rational> var(const RectQuery& q) const;
    std::optional<WeightedHit> min(const RectQuery& q) const { return extreme(q, false); }
    std::optional<WeightedHit> max(const RectQuery& q) const { return extreme(q, true); }

    const DynamicWavelet& tree() const { return tree_; }
    const PointOrder& order() const { return order_; }
    uint64_t bits() const;
    void audit() const;

private:
    RankRect map_rect(const RectQuery& q) const;
    std::vector<Point> visible(const RankRect& r, Direction dir, GeomStats* stats) const;
    RangeAgg totals(const RectQuery& q) const;
    std::optional<WeightedHit> extreme(const RectQuery& q, bool maximum) const;
    Point point_at(uint64_t pos) const;

    uint64_t U_, W_;
    uint64_t seq_ = 0;
    PointOrder order_;
    DynamicWavelet tree_;
    std::vector<WeightBlocks> weights_;  // levels 0..depth
};

// Wavelet tree over raw weights [0, W) with a dynamic grid over global y at
// the root, every ceil(log2 ell) levels and at the leaves. Node bitmaps are
// the levels of a dynamic wavelet tree over the weights in x order.
class DynamicValueTree {
public:
    DynamicValueTree(uint64_t U, uint64_t W, uint64_t ell = 2);

    uint64_t size() const { return order_.size(); }
    bool has_grid(unsigned d) const { return d % step_ == 0 || d == values_.depth(); }
    unsigned value_depth() const { return values_.depth(); }
    unsigned grid_count() const {
        unsigned c = 0;
        for (unsigned d = 0; d <= values_.depth(); ++d) c += has_grid(d);
        return c;
    }

    void insert(const Point& p, UpdateStats* stats = nullptr);
    Point erase(uint64_t x, uint64_t y, UpdateStats* stats = nullptr);
    void update(uint64_t x, uint64_t y, uint64_t w, UpdateStats* stats = nullptr);

    ValueCount quantile(const RectQuery& q, uint64_t k) const;
    std::vector<ValueCount> majority(const RectQuery& q, Fraction alpha) const;
    std::optional<uint64_t> successor(const RectQuery& q, uint64_t w) const;
    std::optional<uint64_t> predecessor(const RectQuery& q, uint64_t w) const;
    uint64_t count_value_range(const RectQuery& q, uint64_t w0, uint64_t w1) const;

    uint64_t bits() const;
    void audit() const;

private:
    struct Frame {
        WtNode v;
        uint64_t x0, x1;  // local, half-open
        bool empty() const { return x0 >= x1; }
    };
    struct YRange {
        uint64_t y0, y1;
        bool empty;
    };
    Frame root_frame(const RectQuery& q, YRange& ys) const;
    Frame child(const Frame& f, bool b) const;
    uint64_t count(const Frame& f, const YRange& ys) const;
    ValueCount descend(const Frame& root, const YRange& ys, uint64_t k) const;
    uint64_t count_values(const Frame& f, const YRange& ys, uint64_t c0, uint64_t c1) const;
    std::optional<uint64_t> first_present(const Frame& f, const YRange& ys, uint64_t c0, uint64_t c1,
                                          bool leftmost) const;

    uint64_t U_, W_;
    unsigned step_;
    uint64_t seq_ = 0;
    PointOrder order_;
    DynamicWavelet values_;
    std::vector<DynamicWavelet> grids_;  // by level; empty where absent
};

// Both dynamic structures kept in step.
class DynamicIndex {
public:
    DynamicIndex(uint64_t U, uint64_t W, uint64_t t = 1, uint64_t ell = 2) : grid(U, W, t), values(U, W, ell) {}

    void insert(const Point& p, UpdateStats* stats = nullptr) {
        grid.insert(p, stats);
        values.insert(p, stats);
    }
    Point erase(uint64_t x, uint64_t y, UpdateStats* stats = nullptr) {
        values.erase(x, y, stats);
        return grid.erase(x, y, stats);
    }
    void update(uint64_t x, uint64_t y, uint64_t w, UpdateStats* stats = nullptr) {
        grid.update(x, y, w, stats);
        values.update(x, y, w, stats);
    }

    DynamicGrid grid;
    DynamicValueTree values;
};

}  // namespace wtgrid
