#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "wtgrid/int_vector.hpp"
#include "wtgrid/io.hpp"

namespace wtgrid {

// Growable bit buffer used to assemble bitmaps before indexing them.
class BitBuilder {
public:
    BitBuilder() = default;
    explicit BitBuilder(uint64_t n) : n_(n), words_((n + 63) / 64, 0) {}

    void push_back(bool b) {
        if ((n_ & 63) == 0) words_.push_back(0);
        if (b) words_[n_ >> 6] |= 1ULL << (n_ & 63);
        ++n_;
    }
    void set(uint64_t i, bool b = true) {
        if (b)
            words_[i >> 6] |= 1ULL << (i & 63);
        else
            words_[i >> 6] &= ~(1ULL << (i & 63));
    }
    bool operator[](uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    uint64_t size() const { return n_; }
    std::vector<uint64_t>& words() { return words_; }

private:
    uint64_t n_ = 0;
    std::vector<uint64_t> words_;
};

// Plain bitmap with a one-level rank directory (one cumulative count per
// 512-bit superblock) and sampled select. rank1/rank0 take an exclusive end
// position; select1/select0 take a 1-based occurrence number.
class PlainBits {
public:
    static constexpr uint64_t kSuperBits = 512;
    static constexpr uint64_t kSelectSample = 4096;

    PlainBits() { build_index(); }
    explicit PlainBits(BitBuilder&& b);
    PlainBits(std::vector<uint64_t> words, uint64_t n);

    uint64_t size() const { return n_; }
    uint64_t ones() const { return super_.back(); }
    uint64_t zeros() const { return n_ - ones(); }

    bool operator[](uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    uint64_t rank1(uint64_t pos) const;
    uint64_t rank0(uint64_t pos) const { return pos - rank1(pos); }
    uint64_t rank(bool b, uint64_t pos) const { return b ? rank1(pos) : rank0(pos); }
    uint64_t select1(uint64_t k) const;
    uint64_t select0(uint64_t k) const;
    uint64_t select(bool b, uint64_t k) const { return b ? select1(k) : select0(k); }

    // Storage actually held, including the directory.
    uint64_t bits() const;

    const std::vector<uint64_t>& words() const { return words_; }

    // Test hook: flips one bit and rebuilds the directory.
    void flip(uint64_t i);

    void save(ByteWriter& out) const;
    static PlainBits load(ByteReader& in);

private:
    void build_index();

    uint64_t n_ = 0;
    std::vector<uint64_t> words_;
    std::vector<uint64_t> super_;
    std::vector<uint64_t> sel1_;
    std::vector<uint64_t> sel0_;
};

// Elias-Fano encoding of a bitmap of length u with m set bits: the low
// floor(log2(u/m)) bits of each set position are stored verbatim, the high
// parts in unary over a plain bitmap.
class SparseBits {
public:
    SparseBits() = default;
    SparseBits(std::span<const uint64_t> positions, uint64_t universe);

    uint64_t size() const { return u_; }
    uint64_t ones() const { return m_; }
    uint64_t zeros() const { return u_ - m_; }

    bool operator[](uint64_t i) const { return rank1(i + 1) - rank1(i) == 1; }
    uint64_t rank1(uint64_t pos) const;
    uint64_t rank0(uint64_t pos) const { return pos - rank1(pos); }
    uint64_t select1(uint64_t k) const;
    uint64_t select0(uint64_t k) const;

    uint64_t bits() const { return low_.bits() + high_.bits(); }
    unsigned low_width() const { return l_; }

    void save(ByteWriter& out) const;
    static SparseBits load(ByteReader& in);

private:
    uint64_t u_ = 0;
    uint64_t m_ = 0;
    unsigned l_ = 0;
    IntVector low_;
    PlainBits high_;
};

enum class Encoding : uint8_t { plain = 0, sparse = 1 };

// Uniform front-end over both encodings with the conventions used
// throughout: rank is inclusive of i (rank(b, -1) = 0) and select is 1-based
// (select(b, 0) = -1).
class RankSelectBits {
public:
    RankSelectBits() = default;
    RankSelectBits(const std::vector<bool>& bits, Encoding enc);

    Encoding encoding() const { return rep_.index() == 0 ? Encoding::plain : Encoding::sparse; }
    uint64_t size() const;
    uint64_t count(bool b) const;
    bool access(uint64_t i) const;
    uint64_t rank(bool b, int64_t i) const;
    int64_t select(bool b, uint64_t k) const;
    uint64_t bits() const;

    void save(ByteWriter& out) const;
    static RankSelectBits load(ByteReader& in);

private:
    std::variant<PlainBits, SparseBits> rep_;
};

// Non-negative integers v_0..v_{k-1} stored as the concatenation of
// v_i zeros followed by a one, kept in the sparse encoding. The prefix sum
// through i is select1(i+1) - i.
class UnaryPartialSums {
public:
    static constexpr uint64_t kMaxExpansion = 1ULL << 62;

    UnaryPartialSums() = default;
    explicit UnaryPartialSums(std::span<const uint64_t> values);

    uint64_t size() const { return bits_.ones(); }
    uint64_t prefix_sum(int64_t i) const;
    // Sum of v_j for j in [from, to).
    uint64_t range_sum(uint64_t from, uint64_t to) const {
        return prefix_sum(static_cast<int64_t>(to) - 1) - prefix_sum(static_cast<int64_t>(from) - 1);
    }
    uint64_t bits() const { return bits_.bits(); }

    void save(ByteWriter& out) const { bits_.save(out); }
    static UnaryPartialSums load(ByteReader& in) {
        UnaryPartialSums p;
        p.bits_ = SparseBits::load(in);
        return p;
    }

private:
    SparseBits bits_;
};

}  // namespace wtgrid
