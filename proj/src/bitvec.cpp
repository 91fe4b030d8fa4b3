#include "wtgrid/bitvec.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "wtgrid/bitops.hpp"

namespace wtgrid {

namespace {

constexpr uint64_t kWordsPerSuper = PlainBits::kSuperBits / 64;

}  // namespace

PlainBits::PlainBits(BitBuilder&& b) : n_(b.size()), words_(std::move(b.words())) { build_index(); }

PlainBits::PlainBits(std::vector<uint64_t> words, uint64_t n) : n_(n), words_(std::move(words)) { build_index(); }

void PlainBits::build_index() {
    uint64_t nsb = (n_ + kSuperBits - 1) / kSuperBits;
    words_.resize(nsb * kWordsPerSuper, 0);
    for (uint64_t j = (n_ + 63) / 64; j < words_.size(); ++j) words_[j] = 0;
    if (n_ & 63) words_[n_ >> 6] &= (1ULL << (n_ & 63)) - 1;
    super_.assign(nsb + 1, 0);
    sel1_.clear();
    sel0_.clear();
    uint64_t ones = 0;
    for (uint64_t sb = 0; sb < nsb; ++sb) {
        super_[sb] = ones;
        for (uint64_t w = 0; w < kWordsPerSuper; ++w) ones += std::popcount(words_[sb * kWordsPerSuper + w]);
    }
    super_[nsb] = ones;
    // Superblock holding every kSelectSample-th one (and zero).
    uint64_t next1 = 0, next0 = 0;
    uint64_t total0 = n_ - ones;
    for (uint64_t sb = 0; sb < nsb; ++sb) {
        uint64_t end1 = super_[sb + 1];
        uint64_t end0 = std::min(n_, (sb + 1) * kSuperBits) - end1;
        while (next1 < end1) {
            sel1_.push_back(sb);
            next1 += kSelectSample;
        }
        while (next0 < end0 && next0 < total0) {
            sel0_.push_back(sb);
            next0 += kSelectSample;
        }
    }
}

uint64_t PlainBits::rank1(uint64_t pos) const {
    if (pos >= n_) return ones();
    uint64_t sb = pos / kSuperBits;
    uint64_t r = super_[sb];
    uint64_t w = pos >> 6;
    for (uint64_t j = sb * kWordsPerSuper; j < w; ++j) r += std::popcount(words_[j]);
    if (pos & 63) r += std::popcount(words_[w] & ((1ULL << (pos & 63)) - 1));
    return r;
}

uint64_t PlainBits::select1(uint64_t k) const {
    if (k == 0 || k > ones()) throw Error(Errc::not_found, "select1 beyond count");
    uint64_t k1 = k - 1;
    uint64_t s = k1 / kSelectSample;
    uint64_t lo = sel1_[s];
    uint64_t hi = s + 1 < sel1_.size() ? sel1_[s + 1] : super_.size() - 2;
    while (lo < hi) {
        uint64_t mid = (lo + hi + 1) / 2;
        if (super_[mid] <= k1)
            lo = mid;
        else
            hi = mid - 1;
    }
    k1 -= super_[lo];
    for (uint64_t j = lo * kWordsPerSuper;; ++j) {
        unsigned c = std::popcount(words_[j]);
        if (k1 < c) return j * 64 + select_in_word(words_[j], static_cast<unsigned>(k1));
        k1 -= c;
    }
}

uint64_t PlainBits::select0(uint64_t k) const {
    if (k == 0 || k > zeros()) throw Error(Errc::not_found, "select0 beyond count");
    uint64_t k1 = k - 1;
    uint64_t s = k1 / kSelectSample;
    uint64_t lo = sel0_[s];
    uint64_t hi = s + 1 < sel0_.size() ? sel0_[s + 1] : super_.size() - 2;
    auto zeros_before = [&](uint64_t sb) { return sb * kSuperBits - super_[sb]; };
    while (lo < hi) {
        uint64_t mid = (lo + hi + 1) / 2;
        if (zeros_before(mid) <= k1)
            lo = mid;
        else
            hi = mid - 1;
    }
    k1 -= zeros_before(lo);
    for (uint64_t j = lo * kWordsPerSuper;; ++j) {
        unsigned c = std::popcount(~words_[j]);
        if (k1 < c) return j * 64 + select_in_word(~words_[j], static_cast<unsigned>(k1));
        k1 -= c;
    }
}

uint64_t PlainBits::bits() const {
    if (n_ == 0) return 0;
    return ((n_ + 63) / 64) * 64 + super_.size() * 64 + (sel1_.size() + sel0_.size()) * 64;
}

void PlainBits::flip(uint64_t i) {
    words_[i >> 6] ^= 1ULL << (i & 63);
    build_index();
}

void PlainBits::save(ByteWriter& out) const {
    out.u64(n_);
    std::vector<uint64_t> w(words_.begin(), words_.begin() + (n_ + 63) / 64);
    out.words(w);
}

PlainBits PlainBits::load(ByteReader& in) {
    uint64_t n = in.u64();
    auto w = in.words();
    if (w.size() != (n + 63) / 64) throw Error(Errc::corrupt, "bitmap length mismatch");
    return PlainBits(std::move(w), n);
}

SparseBits::SparseBits(std::span<const uint64_t> positions, uint64_t universe) : u_(universe), m_(positions.size()) {
    if (m_ > 0 && positions.back() >= u_) throw Error(Errc::out_of_range, "sparse position beyond universe");
    l_ = 0;
    if (m_ > 0 && u_ / m_ > 1) l_ = static_cast<unsigned>(std::bit_width(u_ / m_) - 1);
    low_ = IntVector(m_, l_);
    uint64_t hsize = m_ + (u_ >> l_) + 1;
    BitBuilder hb(hsize);
    uint64_t mask = l_ == 0 ? 0 : (1ULL << l_) - 1;
    for (uint64_t i = 0; i < m_; ++i) {
        if (i > 0 && positions[i] <= positions[i - 1]) throw Error(Errc::invalid_argument, "sparse positions must increase");
        low_.set(i, positions[i] & mask);
        hb.set((positions[i] >> l_) + i);
    }
    high_ = PlainBits(std::move(hb));
}

uint64_t SparseBits::select1(uint64_t k) const {
    if (k == 0 || k > m_) throw Error(Errc::not_found, "select1 beyond count");
    return ((high_.select1(k) - (k - 1)) << l_) | low_[k - 1];
}

uint64_t SparseBits::rank1(uint64_t pos) const {
    if (pos >= u_) return m_;
    uint64_t h = pos >> l_;
    uint64_t low = l_ == 0 ? 0 : pos & ((1ULL << l_) - 1);
    uint64_t i, p;
    if (h == 0) {
        i = 0;
        p = 0;
    } else {
        uint64_t z = high_.select0(h);
        i = z - h + 1;
        p = z + 1;
    }
    while (p < high_.size() && high_[p] && low_[i] < low) {
        ++i;
        ++p;
    }
    return i;
}

uint64_t SparseBits::select0(uint64_t k) const {
    if (k == 0 || k > zeros()) throw Error(Errc::not_found, "select0 beyond count");
    // Ones preceding the k-th zero are those with (position - index) <= k-1.
    uint64_t lo = 0, hi = m_;
    while (lo < hi) {
        uint64_t mid = (lo + hi) / 2;
        if (select1(mid + 1) - mid <= k - 1)
            lo = mid + 1;
        else
            hi = mid;
    }
    return (k - 1) + lo;
}

void SparseBits::save(ByteWriter& out) const {
    out.u64(u_);
    out.u64(m_);
    out.u8(static_cast<uint8_t>(l_));
    low_.save(out);
    high_.save(out);
}

SparseBits SparseBits::load(ByteReader& in) {
    SparseBits s;
    s.u_ = in.u64();
    s.m_ = in.u64();
    s.l_ = in.u8();
    s.low_ = IntVector::load(in);
    s.high_ = PlainBits::load(in);
    if (s.high_.ones() != s.m_ || s.low_.size() != s.m_) throw Error(Errc::corrupt, "sparse bitmap inconsistent");
    return s;
}

RankSelectBits::RankSelectBits(const std::vector<bool>& bits, Encoding enc) {
    if (enc == Encoding::plain) {
        BitBuilder b(bits.size());
        for (uint64_t i = 0; i < bits.size(); ++i)
            if (bits[i]) b.set(i);
        rep_ = PlainBits(std::move(b));
    } else {
        std::vector<uint64_t> pos;
        for (uint64_t i = 0; i < bits.size(); ++i)
            if (bits[i]) pos.push_back(i);
        rep_ = SparseBits(pos, bits.size());
    }
}

uint64_t RankSelectBits::size() const {
    return std::visit([](const auto& r) { return r.size(); }, rep_);
}

uint64_t RankSelectBits::count(bool b) const {
    return std::visit([b](const auto& r) { return b ? r.ones() : r.zeros(); }, rep_);
}

bool RankSelectBits::access(uint64_t i) const {
    if (i >= size()) throw Error(Errc::out_of_range, "access beyond length");
    return std::visit([i](const auto& r) { return r[i]; }, rep_);
}

uint64_t RankSelectBits::rank(bool b, int64_t i) const {
    if (i < -1 || i >= static_cast<int64_t>(size())) throw Error(Errc::out_of_range, "rank index out of range");
    uint64_t pos = static_cast<uint64_t>(i + 1);
    return std::visit([&](const auto& r) { return b ? r.rank1(pos) : r.rank0(pos); }, rep_);
}

int64_t RankSelectBits::select(bool b, uint64_t k) const {
    if (k == 0) return -1;
    if (k > count(b)) throw Error(Errc::not_found, "select beyond count");
    return std::visit([&](const auto& r) { return static_cast<int64_t>(b ? r.select1(k) : r.select0(k)); }, rep_);
}

uint64_t RankSelectBits::bits() const {
    return std::visit([](const auto& r) { return r.bits(); }, rep_);
}

void RankSelectBits::save(ByteWriter& out) const {
    out.u8(static_cast<uint8_t>(encoding()));
    std::visit([&](const auto& r) { r.save(out); }, rep_);
}

RankSelectBits RankSelectBits::load(ByteReader& in) {
    RankSelectBits r;
    uint8_t tag = in.u8();
    if (tag == 0)
        r.rep_ = PlainBits::load(in);
    else if (tag == 1)
        r.rep_ = SparseBits::load(in);
    else
        throw Error(Errc::corrupt, "unknown bitmap encoding " + std::to_string(tag));
    return r;
}

UnaryPartialSums::UnaryPartialSums(std::span<const uint64_t> values) {
    std::vector<uint64_t> pos(values.size());
    uint64_t acc = 0;
    for (uint64_t i = 0; i < values.size(); ++i) {
        if (values[i] > kMaxExpansion - acc) throw Error(Errc::out_of_range, "unary expansion too long");
        acc += values[i];
        pos[i] = acc + i;
    }
    if (acc + values.size() > kMaxExpansion) throw Error(Errc::out_of_range, "unary expansion too long");
    bits_ = SparseBits(pos, acc + values.size());
}

uint64_t UnaryPartialSums::prefix_sum(int64_t i) const {
    if (i < 0) return 0;
    if (static_cast<uint64_t>(i) >= size()) throw Error(Errc::out_of_range, "prefix_sum index out of range");
    return bits_.select1(static_cast<uint64_t>(i) + 1) - static_cast<uint64_t>(i);
}

}  // namespace wtgrid
