#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wtgrid/bitvec.hpp"
#include "wtgrid/int_vector.hpp"

namespace wtgrid {

// Range-minimum (or maximum) positions over an array that is not kept.
// The array is encoded by its left-to-right stack: element i emits one ')'
// per popped element and then '('; pops are strict, so among equal values
// the leftmost survives. Queries find the rightmost minimum excess with a
// min tree over 512-bit blocks.
class BpRmq {
public:
    BpRmq() = default;
    BpRmq(std::span<const uint64_t> values, bool maximum);

    uint64_t size() const { return n_; }
    // Position of the leftmost minimum (maximum) in [i, j].
    uint64_t query(uint64_t i, uint64_t j) const;
    uint64_t bits() const { return bp_.bits() + block_min_.bits(); }

    void save(ByteWriter& out) const;
    static BpRmq load(ByteReader& in);

private:
    static constexpr uint64_t kBlock = 512;

    int64_t excess(uint64_t x) const { return 2 * int64_t(bp_.rank1(x + 1)) - int64_t(x + 1); }
    // Rightmost position of the minimum excess in [a, b] by scanning.
    std::pair<int64_t, uint64_t> scan(uint64_t a, uint64_t b) const;
    void build_tree();

    uint64_t n_ = 0;
    PlainBits bp_;
    uint64_t leaves_ = 0;
    // implicit segment tree of block minima (excess values)
    IntVector block_min_;
};

}  // namespace wtgrid
