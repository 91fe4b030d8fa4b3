#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "wtgrid/io.hpp"

namespace wtgrid {

// Number of bits needed to store any value in [0, bound).
inline unsigned width_for(uint64_t bound) {
    return bound <= 1 ? 0 : static_cast<unsigned>(std::bit_width(bound - 1));
}

inline unsigned ceil_log2(uint64_t x) { return width_for(x); }

// Fixed-width packed integer sequence.
class IntVector {
public:
    IntVector() = default;
    IntVector(uint64_t size, unsigned width) : size_(size), width_(width), words_((size * width + 63) / 64 + 1, 0) {}

    template <typename Range>
    static IntVector from(const Range& values, unsigned width) {
        IntVector v(std::size(values), width);
        uint64_t i = 0;
        for (auto x : values) v.set(i++, static_cast<uint64_t>(x));
        return v;
    }

    uint64_t size() const { return size_; }
    unsigned width() const { return width_; }

    uint64_t operator[](uint64_t i) const {
        if (width_ == 0) return 0;
        uint64_t bit = i * width_;
        uint64_t w = bit >> 6, off = bit & 63;
        uint64_t v = words_[w] >> off;
        if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
        return width_ == 64 ? v : v & ((1ULL << width_) - 1);
    }

    void set(uint64_t i, uint64_t v) {
        if (width_ == 0) return;
        uint64_t mask = width_ == 64 ? ~0ULL : (1ULL << width_) - 1;
        v &= mask;
        uint64_t bit = i * width_;
        uint64_t w = bit >> 6, off = bit & 63;
        words_[w] = (words_[w] & ~(mask << off)) | (v << off);
        if (off + width_ > 64) {
            uint64_t hi = 64 - off;
            words_[w + 1] = (words_[w + 1] & ~(mask >> hi)) | (v >> hi);
        }
    }

    uint64_t bits() const { return size_ * width_; }

    void save(ByteWriter& out) const {
        out.u64(size_);
        out.u8(static_cast<uint8_t>(width_));
        out.words(words_);
    }
    static IntVector load(ByteReader& in) {
        IntVector v;
        v.size_ = in.u64();
        v.width_ = in.u8();
        v.words_ = in.words();
        if (v.width_ > 64 || v.words_.size() < (v.size_ * v.width_ + 63) / 64 + 1)
            throw Error(Errc::corrupt, "bad int vector");
        return v;
    }

private:
    uint64_t size_ = 0;
    unsigned width_ = 0;
    std::vector<uint64_t> words_ = std::vector<uint64_t>(1, 0);
};

}  // namespace wtgrid
