#pragma once

#include <cstdint>
#include <vector>

#include "wtgrid/aligned_stats.hpp"
#include "wtgrid/grid.hpp"
#include "wtgrid/types.hpp"
#include "wtgrid/waveseq.hpp"

namespace wtgrid {

// One rank-space grid per distinct value, all packed into a single
// permutation: the points of value c occupy rows and columns
// [C(c), C(c+1)). Value sequences in x and y order translate a rectangle of
// the main grid into the local ranks of c.
class PerValueGrids {
public:
    PerValueGrids() = default;
    // value_rank[i] is the value rank of the point with x-rank i.
    PerValueGrids(const RankGrid& g, const std::vector<uint64_t>& value_rank, uint64_t m, bool parallel = false);

    uint64_t count(uint64_t c, const RankRect& r) const;
    uint64_t bits() const { return xseq_.bits() + yseq_.bits() + packed_.bits() + starts_.bits(); }

    void save(ByteWriter& out) const;
    static PerValueGrids load(ByteReader& in);

private:
    uint64_t m_ = 0;
    WaveletTree xseq_;
    WaveletTree yseq_;
    WaveletTree packed_;
    UnaryPartialSums starts_;
};

struct MajorityStats {
    uint64_t candidates = 0;
};

// Majority queries for a threshold fixed at build time. Each level of the
// grid's wavelet tree is cut into leaf blocks of b = ceil(s / alpha)
// positions, s = t * ceil(log2 m); a segment tree over those blocks keeps at
// every node the exact list of alpha-majorities of its span.
class FixedMajority {
public:
    FixedMajority() = default;
    FixedMajority(const RankGrid& g, const MinMaxAugmentation& values, Fraction alpha, uint64_t t,
                  bool parallel = false);

    Fraction alpha() const { return alpha_; }
    uint64_t block() const { return block_; }

    // Points of q whose weight equals w.
    uint64_t count_value(uint64_t w, const RectQuery& q) const;
    // Values occurring more than alpha * count(q) times, ascending.
    std::vector<ValueCount> query(const RectQuery& q, MajorityStats* stats = nullptr) const;

    uint64_t candidate_bits() const;
    uint64_t longest_list() const;
    uint64_t grid_bits() const { return grids_.bits(); }

    void save(ByteWriter& out) const;
    static FixedMajority load(ByteReader& in, const RankGrid& g, const MinMaxAugmentation& values);

private:
    struct LevelLists {
        uint64_t leaves = 0;  // padded block count
        IntVector offsets;    // 2 * leaves + 1 entries
        IntVector values;
        uint64_t bits() const { return offsets.bits() + values.bits(); }
    };
    void collect(const LevelLists& L, uint64_t j1, uint64_t j2, std::vector<uint64_t>& out) const;

    const RankGrid* g_ = nullptr;
    const MinMaxAugmentation* v_ = nullptr;
    Fraction alpha_;
    uint64_t t_ = 1;
    uint64_t block_ = 1;
    std::vector<LevelLists> levels_;
    PerValueGrids grids_;
};

}  // namespace wtgrid
