#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wtgrid/aligned_stats.hpp"
#include "wtgrid/grid.hpp"
#include "wtgrid/types.hpp"
#include "wtgrid/waveseq.hpp"

namespace wtgrid {

struct ValueStats {
    uint64_t grid_counts = 0;  // Count(Q) evaluations on a stored grid
    uint64_t probes = 0;       // quantile probes issued by majority / top-k frequent
};

// Wavelet tree over value ranks where every node holds the grid of its
// points. The node bitmaps in x and y order are the levels of two wavelet
// trees over the value-rank sequence read in x and y order. Grids are kept
// every ceil(log2 ell) levels below the root and at the leaves; the root
// grid is the main index.
class ValueWaveletTree {
public:
    ValueWaveletTree() = default;
    ValueWaveletTree(const RankGrid& g, const MinMaxAugmentation& values, uint64_t ell, bool parallel = false);

    uint64_t ell() const { return ell_; }
    unsigned step() const { return step_; }
    unsigned depth() const { return xt_.depth(); }
    bool has_grid(unsigned d) const { return d > 0 && (d % step_ == 0 || d == depth()); }

    // k-th smallest weight in q (1-based) and its frequency there.
    ValueCount quantile(const RectQuery& q, uint64_t k, ValueStats* stats = nullptr) const;
    uint64_t count_value_range(const RectQuery& q, uint64_t w0, uint64_t w1, ValueStats* stats = nullptr) const;
    // Values occurring more than alpha * count(q) times, ascending.
    std::vector<ValueCount> majority(const RectQuery& q, Fraction alpha, ValueStats* stats = nullptr) const;
    std::optional<uint64_t> successor(const RectQuery& q, uint64_t w, ValueStats* stats = nullptr) const;
    std::optional<uint64_t> predecessor(const RectQuery& q, uint64_t w, ValueStats* stats = nullptr) const;
    // Descending count, ties by ascending value.
    std::vector<ValueCount> top_k_frequent(const RectQuery& q, uint64_t k, ValueStats* stats = nullptr) const;
    std::optional<ValueCount> mode(const RectQuery& q, ValueStats* stats = nullptr) const;

    uint64_t map_bits() const { return xt_.bits() + yt_.bits(); }
    uint64_t grid_bits() const;
    uint64_t bits() const { return map_bits() + grid_bits(); }

    void save(ByteWriter& out) const;
    static ValueWaveletTree load(ByteReader& in, const RankGrid& g, const MinMaxAugmentation& values);

private:
    // A node of the value tree with the query rectangle in its local ranks,
    // half-open on both axes.
    struct Frame {
        WtNode xv, yv;
        uint64_t x0, x1, y0, y1;
        bool empty() const { return x0 >= x1 || y0 >= y1; }
    };
    Frame root_frame(const RankRect& r) const;
    Frame child(const Frame& f, bool b) const;
    uint64_t count(const Frame& f, ValueStats* stats) const;
    // Descendants of f at the next level holding a grid, left to right.
    template <typename Fn>
    void next_grid_level(const Frame& f, Fn&& fn) const;
    ValueCount quantile_ranks(const Frame& root, uint64_t k, ValueStats* stats) const;
    uint64_t count_ranks(const Frame& f, uint64_t c0, uint64_t c1, ValueStats* stats) const;
    std::optional<uint64_t> first_present(const Frame& f, uint64_t c0, uint64_t c1, bool leftmost,
                                          ValueStats* stats) const;

    const RankGrid* g_ = nullptr;
    const MinMaxAugmentation* v_ = nullptr;
    uint64_t ell_ = 2;
    unsigned step_ = 1;
    WaveletTree xt_, yt_;
    std::vector<WaveletTree> grids_;  // indexed by level; empty where absent
};

}  // namespace wtgrid
