#include "wtgrid/waveseq.hpp"

#include <algorithm>

namespace wtgrid {

namespace {

PlainBits level_from(std::span<const uint64_t> order, unsigned shift) {
    BitBuilder b(order.size());
    for (uint64_t i = 0; i < order.size(); ++i)
        if ((order[i] >> shift) & 1) b.set(i);
    return PlainBits(std::move(b));
}

}  // namespace

WaveletTree::WaveletTree(std::span<const uint64_t> seq, uint64_t sigma, bool parallel)
    : n_(seq.size()), sigma_(std::max<uint64_t>(sigma, 1)), depth_(ceil_log2(std::max<uint64_t>(sigma, 1))) {
    for (uint64_t c : seq)
        if (c >= sigma_) throw Error(Errc::out_of_range, "symbol outside alphabet");
    levels_.resize(depth_);
    if (depth_ == 0) return;

    if (!parallel) {
        std::vector<uint64_t> cur(seq.begin(), seq.end()), next(n_);
        for (unsigned d = 0; d < depth_; ++d) {
            unsigned shift = depth_ - 1 - d;
            levels_[d] = level_from(cur, shift);
            if (d + 1 == depth_) break;
            // cur is grouped by the top d bits; split each group by bit d
            uint64_t i = 0, out = 0;
            while (i < n_) {
                uint64_t prefix = cur[i] >> (shift + 1), j = i;
                while (j < n_ && (cur[j] >> (shift + 1)) == prefix) ++j;
                for (uint64_t k = i; k < j; ++k)
                    if (!((cur[k] >> shift) & 1)) next[out++] = cur[k];
                for (uint64_t k = i; k < j; ++k)
                    if ((cur[k] >> shift) & 1) next[out++] = cur[k];
                i = j;
            }
            cur.swap(next);
        }
        return;
    }

    // Each level is independent: its order is S stably sorted by the top d bits.
#pragma omp parallel for schedule(dynamic, 1)
    for (unsigned d = 0; d < depth_; ++d) {
        unsigned shift = depth_ - d;
        std::vector<uint64_t> start((uint64_t(1) << d) + 1, 0);
        for (uint64_t c : seq) start[(c >> shift) + 1]++;
        for (uint64_t k = 1; k < start.size(); ++k) start[k] += start[k - 1];
        std::vector<uint64_t> order(n_);
        for (uint64_t c : seq) order[start[c >> shift]++] = c;
        levels_[d] = level_from(order, shift - 1);
    }
}

uint64_t WaveletTree::sym_hi(const WtNode& v) const {
    uint64_t hi = ((v.label + 1) << (depth_ - v.level)) - 1;
    return std::min(hi, sigma_ - 1);
}

WtNode WaveletTree::node_at(unsigned level, uint64_t label) const {
    if (level > depth_) throw Error(Errc::out_of_range, "level beyond tree depth");
    WtNode v = root();
    for (unsigned d = 0; d < level; ++d) v = child(v, (label >> (level - 1 - d)) & 1);
    return v;
}

uint64_t WaveletTree::access(uint64_t i) const {
    if (i >= n_) throw Error(Errc::out_of_range, "access beyond sequence");
    WtNode v = root();
    while (!is_leaf(v)) {
        bool b = bit(v, i);
        i = local_rank(v, b, i);
        v = child(v, b);
    }
    return v.label;
}

uint64_t WaveletTree::seq_rank(uint64_t c, int64_t i) const {
    if (c >= sigma_) throw Error(Errc::out_of_range, "symbol outside alphabet");
    if (i < -1 || i >= static_cast<int64_t>(n_)) throw Error(Errc::out_of_range, "rank index out of range");
    uint64_t pos = static_cast<uint64_t>(i + 1);
    WtNode v = root();
    for (unsigned d = 0; d < depth_ && pos > 0; ++d) {
        bool b = (c >> (depth_ - 1 - d)) & 1;
        pos = local_rank(v, b, pos);
        v = child(v, b);
    }
    return pos;
}

int64_t WaveletTree::seq_select(uint64_t c, uint64_t k) const {
    if (c >= sigma_) throw Error(Errc::out_of_range, "symbol outside alphabet");
    if (k == 0) return -1;
    std::vector<WtNode> path{root()};
    for (unsigned d = 0; d < depth_; ++d) path.push_back(child(path.back(), (c >> (depth_ - 1 - d)) & 1));
    if (k > path.back().size) throw Error(Errc::not_found, "symbol occurs fewer times");
    uint64_t pos = k - 1;
    for (unsigned d = depth_; d-- > 0;) pos = local_select(path[d], (c >> (depth_ - 1 - d)) & 1, pos + 1);
    return static_cast<int64_t>(pos);
}

int64_t WaveletTree::reduce(const WtNode& from, std::string_view bits, int64_t i) const {
    if (i < -1 || i >= static_cast<int64_t>(from.size)) throw Error(Errc::out_of_range, "reduce index out of range");
    if (from.level + bits.size() > depth_) throw Error(Errc::out_of_range, "bit path longer than tree");
    WtNode v = from;
    for (char ch : bits) {
        bool b = ch == '1';
        i = static_cast<int64_t>(local_rank(v, b, static_cast<uint64_t>(i + 1))) - 1;
        v = child(v, b);
    }
    return i;
}

int64_t WaveletTree::unreduce(const WtNode& from, const WtNode& to, int64_t i) const {
    if (to.level > from.level || (from.label >> (from.level - to.level)) != to.label)
        throw Error(Errc::invalid_argument, "target is not an ancestor");
    if (i < 0 || i >= static_cast<int64_t>(from.size)) throw Error(Errc::out_of_range, "unreduce index out of range");
    unsigned steps = from.level - to.level;
    std::vector<WtNode> path{to};
    for (unsigned s = 0; s < steps; ++s) path.push_back(child(path.back(), (from.label >> (steps - 1 - s)) & 1));
    if (path.back().start != from.start) throw Error(Errc::invalid_argument, "node does not belong to this tree");
    uint64_t pos = static_cast<uint64_t>(i);
    for (unsigned s = steps; s-- > 0;) pos = local_select(path[s], (from.label >> (steps - 1 - s)) & 1, pos + 1);
    return static_cast<int64_t>(pos);
}

std::vector<WtNode> WaveletTree::decompose(uint64_t y0, uint64_t y1) const {
    if (y0 > y1) throw Error(Errc::empty_range, "empty symbol range");
    if (y1 >= sigma_) throw Error(Errc::out_of_range, "symbol outside alphabet");
    std::vector<WtNode> out;
    auto rec = [&](auto&& self, const WtNode& v) -> void {
        uint64_t a = sym_lo(v);
        if (a >= sigma_) return;
        uint64_t b = sym_hi(v);
        if (b < y0 || a > y1) return;
        if (y0 <= a && b <= y1) {
            out.push_back(v);
            return;
        }
        self(self, child(v, false));
        self(self, child(v, true));
    };
    rec(rec, root());
    return out;
}

uint64_t WaveletTree::count_range(uint64_t x0, uint64_t x1, uint64_t y0, uint64_t y1) const {
    uint64_t c = 0;
    for_each_cover(x0, x1, y0, y1, [&](const WtNode&, uint64_t lo, uint64_t hi) { c += hi - lo; });
    return c;
}

uint64_t WaveletTree::bits() const {
    uint64_t b = 0;
    for (const auto& L : levels_) b += L.bits();
    return b;
}

void WaveletTree::save(ByteWriter& out) const {
    out.u64(sigma_);
    out.u64(n_);
    out.u8(static_cast<uint8_t>(depth_));
    for (const auto& L : levels_) L.save(out);
}

WaveletTree WaveletTree::load(ByteReader& in) {
    WaveletTree t;
    t.sigma_ = in.u64();
    t.n_ = in.u64();
    t.depth_ = in.u8();
    if (t.sigma_ == 0 || t.depth_ != ceil_log2(t.sigma_)) throw Error(Errc::corrupt, "wavelet tree header");
    for (unsigned d = 0; d < t.depth_; ++d) {
        t.levels_.push_back(PlainBits::load(in));
        if (t.levels_.back().size() != t.n_) throw Error(Errc::corrupt, "wavelet level length");
    }
    return t;
}

}  // namespace wtgrid
