#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wtgrid/error.hpp"

namespace wtgrid {

// Little-endian fixed-width binary encoding used by every serialized section.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u16(uint16_t v) { put_le(v, 2); }
    void u32(uint32_t v) { put_le(v, 4); }
    void u64(uint64_t v) { put_le(v, 8); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void words(std::span<const uint64_t> w) {
        u64(w.size());
        for (uint64_t x : w) u64(x);
    }
    void bytes(std::string_view s) {
        u64(s.size());
        buf_.append(s);
    }
    void raw(std::string_view s) { buf_.append(s); }

    const std::string& str() const { return buf_; }
    std::string take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }

private:
    void put_le(uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    uint8_t u8() { return static_cast<uint8_t>(get_le(1)); }
    uint16_t u16() { return static_cast<uint16_t>(get_le(2)); }
    uint32_t u32() { return static_cast<uint32_t>(get_le(4)); }
    uint64_t u64() { return get_le(8); }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::vector<uint64_t> words() {
        uint64_t n = u64();
        need(n * 8);
        std::vector<uint64_t> w(n);
        for (auto& x : w) x = u64();
        return w;
    }
    std::string_view bytes() {
        uint64_t n = u64();
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string_view raw(size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    size_t pos() const { return pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    void need(uint64_t n) const {
        if (n > data_.size() - pos_) throw Error(Errc::corrupt, "truncated section");
    }
    uint64_t get_le(int n) {
        need(n);
        uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<uint64_t>(static_cast<uint8_t>(data_[pos_ + i])) << (8 * i);
        pos_ += n;
        return v;
    }
    std::string_view data_;
    size_t pos_ = 0;
};

// FNV-1a, 64-bit. Container checksums use this exact variant.
inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace wtgrid
