#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "wtgrid/bitvec.hpp"

namespace wtgrid {

// A node of the levelwise wavelet tree. Nodes at one level occupy disjoint
// contiguous ranges of that level's bitmap, ordered by label.
struct WtNode {
    unsigned level = 0;
    uint64_t label = 0;
    uint64_t start = 0;
    uint64_t size = 0;

    bool operator==(const WtNode&) const = default;
};

// Wavelet tree over S[0,n) on [0,sigma), complete over the padded alphabet.
// Every level is one length-n bitmap; node v at level d owns
// [v.start, v.start + v.size) of it.
class WaveletTree {
public:
    WaveletTree() = default;
    WaveletTree(std::span<const uint64_t> seq, uint64_t sigma, bool parallel = false);

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
    // Descends from the root following the bits of label.
    WtNode node_at(unsigned level, uint64_t label) const;
    WtNode leaf(uint64_t c) const { return node_at(depth_, c); }

    // Symbols covered by v: [sym_lo(v), sym_hi(v)] clipped to the alphabet.
    uint64_t sym_lo(const WtNode& v) const { return v.label << (depth_ - v.level); }
    uint64_t sym_hi(const WtNode& v) const;

    bool bit(const WtNode& v, uint64_t i) const { return levels_[v.level][v.start + i]; }
    // Occurrences of b in B(v)[0, i).
    uint64_t local_rank(const WtNode& v, bool b, uint64_t i) const {
        const auto& L = levels_[v.level];
        uint64_t r = L.rank1(v.start + i) - L.rank1(v.start);
        return b ? r : i - r;
    }
    // Position within B(v) of the k-th b (1-based).
    uint64_t local_select(const WtNode& v, bool b, uint64_t k) const {
        const auto& L = levels_[v.level];
        uint64_t before = b ? L.rank1(v.start) : L.rank0(v.start);
        return L.select(b, before + k) - v.start;
    }

    uint64_t access(uint64_t i) const;
    uint64_t seq_rank(uint64_t c, int64_t i) const;
    int64_t seq_select(uint64_t c, uint64_t k) const;

    // R(from, bits, i): follows bits downwards from `from`, mapping an
    // inclusive prefix end. -1 stays -1.
    int64_t reduce(const WtNode& from, std::string_view bits, int64_t i) const;
    // Z(from, to, i): maps position i of B(from) up to the ancestor `to`.
    int64_t unreduce(const WtNode& from, const WtNode& to, int64_t i) const;
    // Maximal nodes tiling [y0, y1], left to right.
    std::vector<WtNode> decompose(uint64_t y0, uint64_t y1) const;

    // Calls fn(node, lo, hi) for every maximal node whose symbols lie in
    // [y0, y1], with [lo, hi) the part of B(node) coming from positions
    // [x0, x1) of the root. Nodes with empty local ranges are skipped.
    template <typename Fn>
    void for_each_cover(uint64_t x0, uint64_t x1, uint64_t y0, uint64_t y1, Fn&& fn) const {
        if (x0 >= x1 || y0 > y1 || n_ == 0) return;
        cover_rec(root(), x0, x1, y0, y1, fn);
    }
    // Number of positions in [x0, x1) holding a symbol in [y0, y1].
    uint64_t count_range(uint64_t x0, uint64_t x1, uint64_t y0, uint64_t y1) const;

    const PlainBits& level_bits(unsigned d) const { return levels_[d]; }
    // Test hook for fault injection.
    void flip_bit(unsigned level, uint64_t pos) { levels_.at(level).flip(pos); }
    uint64_t bits() const;
    // Storage of the level bitmaps without their directories.
    uint64_t payload_bits() const { return uint64_t(n_) * depth_; }

    void save(ByteWriter& out) const;
    static WaveletTree load(ByteReader& in);

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
        uint64_t z0 = local_rank(v, false, lo), z1 = local_rank(v, false, hi);
        cover_rec(child(v, false), z0, z1, y0, y1, fn);
        cover_rec(child(v, true), lo - z0, hi - z1, y0, y1, fn);
    }

    uint64_t n_ = 0;
    uint64_t sigma_ = 0;
    unsigned depth_ = 0;
    std::vector<PlainBits> levels_;
};

}  // namespace wtgrid
