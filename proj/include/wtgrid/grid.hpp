#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wtgrid/bitvec.hpp"
#include "wtgrid/int_vector.hpp"
#include "wtgrid/waveseq.hpp"

namespace wtgrid {

struct Point {
    uint64_t x = 0;
    uint64_t y = 0;
    uint64_t w = 0;

    bool operator==(const Point&) const = default;
};

struct WeightedPointSet {
    std::vector<Point> points;
    uint64_t U = 1;
    uint64_t W = 1;

    // Throws Errc::data if a coordinate or weight is outside its bound.
    void validate() const;
};

// Closed universe rectangle [x0,x1] x [y0,y1]. x0 > x1 or y0 > y1 is empty.
struct RectQuery {
    uint64_t x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    static RectQuery full() { return {0, UINT64_MAX, 0, UINT64_MAX}; }
    bool contains(const Point& p) const { return x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1; }
};

// Closed rectangle in rank space. Default-constructed value is the empty one.
struct RankRect {
    uint64_t x0 = 1, x1 = 0, y0 = 1, y1 = 0;

    bool empty() const { return x0 > x1 || y0 > y1; }
    uint64_t width() const { return empty() ? 0 : x1 - x0 + 1; }
};

struct SpaceReport {
    uint64_t n = 0;
    uint64_t x_map_bits = 0;
    uint64_t y_map_bits = 0;
    uint64_t tree_bits = 0;
    uint64_t weight_bits = 0;
    // log2(n! * C(U+n, n)^2)
    double optimal_bits = 0;
    // log2 C(U^2, n) + 2n
    double alternative_bits = 0;

    uint64_t index_bits() const { return x_map_bits + y_map_bits + tree_bits; }
};

// Sorted coordinates x_0 <= ... <= x_{n-1} < U as a sparse bitmap over
// [0, U+n) with a one at x_i + i.
class CoordMap {
public:
    CoordMap() = default;
    CoordMap(const std::vector<uint64_t>& sorted, uint64_t universe);

    uint64_t size() const { return n_; }
    uint64_t at(uint64_t i) const { return bits_.select1(i + 1) - i; }
    // Number of coordinates <= v (resp. < v).
    uint64_t count_le(uint64_t v) const;
    uint64_t count_lt(uint64_t v) const { return v == 0 ? 0 : count_le(v - 1); }
    uint64_t bits() const { return n_ == 0 ? 0 : bits_.bits(); }

    void save(ByteWriter& out) const;
    static CoordMap load(ByteReader& in);

private:
    uint64_t n_ = 0;
    uint64_t u_ = 0;
    SparseBits bits_;
};

// Rank-space grid: the point with x-rank i has y-rank S[i]. Equal x are
// ranked by increasing y and equal y by increasing x, so duplicates keep
// input order on both axes.
class RankGrid {
public:
    RankGrid() = default;
    explicit RankGrid(const WeightedPointSet& ps, bool parallel = false);

    uint64_t size() const { return n_; }
    uint64_t universe() const { return U_; }
    uint64_t weight_bound() const { return W_; }
    const WaveletTree& tree() const { return tree_; }
    const CoordMap& xmap() const { return xmap_; }
    const CoordMap& ymap() const { return ymap_; }

    uint64_t yrank(uint64_t xrank) const { return tree_.access(xrank); }
    uint64_t xrank(uint64_t yrank) const { return static_cast<uint64_t>(tree_.seq_select(yrank, 1)); }
    uint64_t weight(uint64_t xrank) const { return weights_[xrank]; }
    const IntVector& weights() const { return weights_; }
    Point point_at(uint64_t xrank) const { return {xmap_.at(xrank), ymap_.at(yrank(xrank)), weight(xrank)}; }

    // Ranks sharing the universe coordinate of the given rank.
    uint64_t x_group_first(uint64_t xrank) const { return xmap_.count_lt(xmap_.at(xrank)); }
    uint64_t x_group_last(uint64_t xrank) const { return xmap_.count_le(xmap_.at(xrank)) - 1; }
    uint64_t y_group_first(uint64_t yrank) const { return ymap_.count_lt(ymap_.at(yrank)); }
    uint64_t y_group_last(uint64_t yrank) const { return ymap_.count_le(ymap_.at(yrank)) - 1; }

    RankRect map_rect(const RectQuery& q) const;

    uint64_t count(const RankRect& r) const;
    uint64_t count(const RectQuery& q) const { return count(map_rect(q)); }

    // Points of the rectangle by descending y-rank, as (x-rank, y-rank).
    std::vector<std::pair<uint64_t, uint64_t>> report_ranks(const RankRect& r) const;
    std::vector<Point> report(const RectQuery& q) const;

    SpaceReport space_report() const;
    // Test hook for fault injection.
    void flip_tree_bit(unsigned level, uint64_t pos) { tree_.flip_bit(level, pos); }

    void save(ByteWriter& out) const;
    static RankGrid load(ByteReader& in);

private:
    uint64_t n_ = 0;
    uint64_t U_ = 1;
    uint64_t W_ = 1;
    CoordMap xmap_;
    CoordMap ymap_;
    WaveletTree tree_;
    IntVector weights_;
};

// log2 of n! and of the binomial coefficient, via lgamma.
double log2_factorial(double n);
double log2_binomial(double n, double k);

}  // namespace wtgrid
