#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "wtgrid/waveseq.hpp"

namespace wtgrid {

// Position arithmetic on the wavelet tree of a permutation of [0,n): the
// node at level d with label l starts at min(n, l << (depth - d)), so moving
// one level down or up costs one rank or select.
class PermLevels {
public:
    PermLevels() = default;
    explicit PermLevels(const WaveletTree& t) : t_(&t), n_(t.size()), depth_(t.depth()) {}

    unsigned depth() const { return depth_; }
    uint64_t size() const { return n_; }
    uint64_t node_start(unsigned d, uint64_t label) const {
        unsigned s = depth_ - d;
        return (label >> (63 - s)) ? n_ : std::min(n_, label << s);
    }
    uint64_t label_of(unsigned d, uint64_t p) const { return p >> (depth_ - d); }
    uint64_t node_count(unsigned d) const { return n_ == 0 ? 0 : label_of(d, n_ - 1) + 1; }

    uint64_t down(unsigned d, uint64_t p) const {
        const PlainBits& B = t_->level_bits(d);
        uint64_t l = label_of(d, p);
        uint64_t s = node_start(d, l), e = node_start(d, l + 1);
        if (!B[p]) return s + B.rank0(p) - B.rank0(s);
        uint64_t zeros = B.rank0(e) - B.rank0(s);
        return s + zeros + B.rank1(p) - B.rank1(s);
    }

    uint64_t up(unsigned d, uint64_t p) const {
        const PlainBits& B = t_->level_bits(d - 1);
        uint64_t l = label_of(d, p);
        bool b = l & 1;
        uint64_t ps = node_start(d - 1, l >> 1);
        uint64_t k = p - node_start(d, l);
        return B.select(b, B.rank(b, ps) + k + 1);
    }

    // Root position of level-d position p.
    uint64_t to_root(unsigned d, uint64_t p) const {
        for (; d > 0; --d) p = up(d, p);
        return p;
    }

private:
    const WaveletTree* t_ = nullptr;
    uint64_t n_ = 0;
    unsigned depth_ = 0;
};

// Root positions in the order of level d: the sequence stably sorted by the
// top d bits of its symbols.
inline std::vector<uint64_t> level_order(const std::vector<uint64_t>& seq, unsigned depth, unsigned d) {
    unsigned shift = depth - d;
    std::vector<uint64_t> start((uint64_t(1) << d) + 1, 0);
    for (uint64_t c : seq) start[(c >> shift) + 1]++;
    for (uint64_t k = 1; k < start.size(); ++k) start[k] += start[k - 1];
    std::vector<uint64_t> order(seq.size());
    for (uint64_t i = 0; i < seq.size(); ++i) order[start[seq[i] >> shift]++] = i;
    return order;
}

inline std::vector<uint64_t> sequence_of(const WaveletTree& t) {
    std::vector<uint64_t> s(t.size());
    for (uint64_t i = 0; i < s.size(); ++i) s[i] = t.access(i);
    return s;
}

}  // namespace wtgrid
