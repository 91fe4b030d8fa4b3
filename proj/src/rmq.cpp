#include "wtgrid/rmq.hpp"

#include <array>

namespace wtgrid {

namespace {

struct ByteInfo {
    int8_t delta;
    int8_t min;      // minimum prefix excess within the byte, relative
    uint8_t argmin;  // rightmost bit attaining it
};

const std::array<ByteInfo, 256>& byte_table() {
    static const auto table = [] {
        std::array<ByteInfo, 256> t{};
        for (int v = 0; v < 256; ++v) {
            int e = 0, m = 99, arg = 0;
            for (int b = 0; b < 8; ++b) {
                e += (v >> b) & 1 ? 1 : -1;
                if (e <= m) {
                    m = e;
                    arg = b;
                }
            }
            t[v] = {int8_t(e), int8_t(m), uint8_t(arg)};
        }
        return t;
    }();
    return table;
}

}  // namespace

BpRmq::BpRmq(std::span<const uint64_t> values, bool maximum) : n_(values.size()) {
    BitBuilder b;
    std::vector<uint64_t> stack;
    for (uint64_t v : values) {
        while (!stack.empty() && (maximum ? stack.back() < v : stack.back() > v)) {
            stack.pop_back();
            b.push_back(false);
        }
        stack.push_back(v);
        b.push_back(true);
    }
    bp_ = PlainBits(std::move(b));
    build_tree();
}

void BpRmq::build_tree() {
    uint64_t len = bp_.size();
    uint64_t nb = (len + kBlock - 1) / kBlock;
    leaves_ = 1;
    while (leaves_ < nb) leaves_ <<= 1;
    unsigned width = width_for(len + 2);
    // padding leaves hold the largest storable value so they never win
    uint64_t pad = (uint64_t(1) << width) - 1;
    block_min_ = IntVector(nb == 0 ? 0 : 2 * leaves_, width);
    if (nb == 0) return;
    for (uint64_t k = 0; k < leaves_; ++k) {
        uint64_t v = pad;
        if (k < nb) {
            uint64_t a = k * kBlock, e = std::min(len, a + kBlock) - 1;
            v = uint64_t(scan(a, e).first);
        }
        block_min_.set(leaves_ + k, v);
    }
    for (uint64_t k = leaves_; k-- > 1;) block_min_.set(k, std::min(block_min_[2 * k], block_min_[2 * k + 1]));
}

std::pair<int64_t, uint64_t> BpRmq::scan(uint64_t a, uint64_t b) const {
    const auto& table = byte_table();
    const auto& w = bp_.words();
    int64_t e = a == 0 ? 0 : excess(a - 1);
    int64_t best = INT64_MAX;
    uint64_t arg = a;
    uint64_t x = a;
    auto bit_at = [&](uint64_t p) { return (w[p >> 6] >> (p & 63)) & 1; };
    while (x <= b && (x & 7)) {
        e += bit_at(x) ? 1 : -1;
        if (e <= best) best = e, arg = x;
        ++x;
    }
    while (x + 7 <= b) {
        auto byte = uint8_t(w[x >> 6] >> (x & 63));
        const ByteInfo& info = table[byte];
        if (e + info.min <= best) best = e + info.min, arg = x + info.argmin;
        e += info.delta;
        x += 8;
    }
    while (x <= b) {
        e += bit_at(x) ? 1 : -1;
        if (e <= best) best = e, arg = x;
        ++x;
    }
    return {best, arg};
}

uint64_t BpRmq::query(uint64_t i, uint64_t j) const {
    if (i > j || j >= n_) throw Error(Errc::out_of_range, "rmq range out of bounds");
    if (i == j) return i;
    uint64_t a = bp_.select1(i + 1), b = bp_.select1(j + 1);
    uint64_t ba = a / kBlock, bb = b / kBlock;
    std::pair<int64_t, uint64_t> best{INT64_MAX, a};
    auto take = [&](std::pair<int64_t, uint64_t> c) {
        if (c.first <= best.first) best = c;
    };
    if (ba == bb) {
        best = scan(a, b);
    } else {
        take(scan(a, (ba + 1) * kBlock - 1));
        if (ba + 1 < bb) {
            // rightmost block holding the minimum over blocks (ba, bb)
            uint64_t lo = ba + 1 + leaves_, hi = bb - 1 + leaves_;
            uint64_t mn = UINT64_MAX;
            std::vector<uint64_t> left, right;
            while (lo <= hi) {
                if (lo & 1) left.push_back(lo++);
                if (!(hi & 1)) right.push_back(hi--);
                lo >>= 1;
                hi >>= 1;
            }
            for (auto it = right.rbegin(); it != right.rend(); ++it) left.push_back(*it);
            for (uint64_t k : left) mn = std::min(mn, block_min_[k]);
            if (int64_t(mn) <= best.first) {
                uint64_t node = 0;
                for (auto it = left.rbegin(); it != left.rend(); ++it)
                    if (block_min_[*it] == mn) {
                        node = *it;
                        break;
                    }
                while (node < leaves_) node = block_min_[2 * node + 1] == mn ? 2 * node + 1 : 2 * node;
                uint64_t blk = node - leaves_;
                take(scan(blk * kBlock, (blk + 1) * kBlock - 1));
            }
        }
        take(scan(bb * kBlock, b));
    }
    if (best.first == excess(a)) return i;
    return bp_.rank1(best.second + 2) - 1;
}

void BpRmq::save(ByteWriter& out) const {
    out.u64(n_);
    bp_.save(out);
}

BpRmq BpRmq::load(ByteReader& in) {
    BpRmq r;
    r.n_ = in.u64();
    r.bp_ = PlainBits::load(in);
    if (r.bp_.ones() != r.n_) throw Error(Errc::corrupt, "rmq encoding length");
    r.build_tree();
    return r;
}

}  // namespace wtgrid
