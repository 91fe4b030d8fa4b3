#include "wtgrid/fixed_majority.hpp"

#include <algorithm>

namespace wtgrid {

PerValueGrids::PerValueGrids(const RankGrid& g, const std::vector<uint64_t>& value_rank, uint64_t m, bool parallel)
    : m_(m) {
    uint64_t n = g.size();
    std::vector<uint64_t> yvals(n), cnt(m, 0);
    for (uint64_t i = 0; i < n; ++i) {
        yvals[g.yrank(i)] = value_rank[i];
        ++cnt[value_rank[i]];
    }
    std::vector<uint64_t> base(m + 1, 0);
    for (uint64_t c = 0; c < m; ++c) base[c + 1] = base[c] + cnt[c];
    // local y-rank of each point within its value
    std::vector<uint64_t> seen(m, 0), local_y(n);
    for (uint64_t yr = 0; yr < n; ++yr) local_y[yr] = seen[yvals[yr]]++;
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<uint64_t> packed(n);
    for (uint64_t i = 0; i < n; ++i) {
        uint64_t c = value_rank[i];
        packed[base[c] + seen[c]++] = base[c] + local_y[g.yrank(i)];
    }
    xseq_ = WaveletTree(value_rank, std::max<uint64_t>(m, 1), parallel);
    yseq_ = WaveletTree(yvals, std::max<uint64_t>(m, 1), parallel);
    packed_ = WaveletTree(packed, std::max<uint64_t>(n, 1), parallel);
    starts_ = UnaryPartialSums(cnt);
}

uint64_t PerValueGrids::count(uint64_t c, const RankRect& r) const {
    if (r.empty() || c >= m_) return 0;
    uint64_t lx0 = xseq_.seq_rank(c, int64_t(r.x0) - 1), lx1 = xseq_.seq_rank(c, int64_t(r.x1));
    uint64_t ly0 = yseq_.seq_rank(c, int64_t(r.y0) - 1), ly1 = yseq_.seq_rank(c, int64_t(r.y1));
    if (lx0 >= lx1 || ly0 >= ly1) return 0;
    uint64_t base = starts_.prefix_sum(int64_t(c) - 1);
    return packed_.count_range(base + lx0, base + lx1, base + ly0, base + ly1 - 1);
}

void PerValueGrids::save(ByteWriter& out) const {
    out.u64(m_);
    xseq_.save(out);
    yseq_.save(out);
    packed_.save(out);
    starts_.save(out);
}

PerValueGrids PerValueGrids::load(ByteReader& in) {
    PerValueGrids p;
    p.m_ = in.u64();
    p.xseq_ = WaveletTree::load(in);
    p.yseq_ = WaveletTree::load(in);
    p.packed_ = WaveletTree::load(in);
    p.starts_ = UnaryPartialSums::load(in);
    if (p.starts_.size() != p.m_) throw Error(Errc::corrupt, "per-value grid starts");
    return p;
}

FixedMajority::FixedMajority(const RankGrid& g, const MinMaxAugmentation& values, Fraction alpha, uint64_t t,
                             bool parallel)
    : g_(&g), v_(&values), alpha_(alpha), t_(t) {
    if (t == 0) throw Error(Errc::invalid_argument, "t must be at least 1");
    if (alpha.num == 0 || alpha.num >= alpha.den) throw Error(Errc::invalid_argument, "alpha must lie in (0,1)");
    uint64_t n = g.size(), m = values.distinct();
    unsigned L = g.tree().depth();
    uint64_t s = t * std::max(1u, ceil_log2(m));
    block_ = (s * alpha.den + alpha.num - 1) / alpha.num;

    std::vector<uint64_t> vr(n);
    for (uint64_t i = 0; i < n; ++i) vr[i] = values.value_rank(g.weight(i));
    auto seq = sequence_of(g.tree());
    levels_.resize(L);
    unsigned vwidth = width_for(m);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (unsigned d = 0; d < L; ++d) {
        auto order = level_order(seq, L, d);
        for (auto& i : order) i = vr[i];
        uint64_t nb = (n + block_ - 1) / block_, leaves = 1;
        while (leaves < nb) leaves <<= 1;
        std::vector<std::vector<uint64_t>> lists(2 * leaves);
        std::vector<uint64_t> cnt(m, 0);
        auto span_of = [&](uint64_t k) {
            uint64_t lo = k, hi = k;
            while (lo < leaves) lo = 2 * lo, hi = 2 * hi + 1;
            uint64_t a = std::min(n, (lo - leaves) * block_), b = std::min(n, (hi - leaves + 1) * block_);
            return std::pair{a, b};
        };
        for (uint64_t k = 2 * leaves; k-- > 1;) {
            auto [a, b] = span_of(k);
            if (a >= b) continue;
            for (uint64_t p = a; p < b; ++p) ++cnt[order[p]];
            std::vector<uint64_t> cand;
            if (k >= leaves) {
                cand.assign(order.begin() + a, order.begin() + b);
            } else {
                cand = lists[2 * k];
                cand.insert(cand.end(), lists[2 * k + 1].begin(), lists[2 * k + 1].end());
            }
            std::sort(cand.begin(), cand.end());
            cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
            for (uint64_t c : cand)
                if (alpha_.exceeded_by(cnt[c], b - a)) lists[k].push_back(c);
            for (uint64_t p = a; p < b; ++p) --cnt[order[p]];
        }
        LevelLists ll;
        ll.leaves = leaves;
        uint64_t total = 0;
        for (const auto& l : lists) total += l.size();
        ll.offsets = IntVector(2 * leaves + 1, width_for(total + 1));
        ll.values = IntVector(total, vwidth);
        uint64_t at = 0;
        for (uint64_t k = 0; k < 2 * leaves; ++k) {
            ll.offsets.set(k, at);
            for (uint64_t c : lists[k]) ll.values.set(at++, c);
        }
        ll.offsets.set(2 * leaves, at);
        levels_[d] = std::move(ll);
    }
    grids_ = PerValueGrids(g, vr, m, parallel);
}

void FixedMajority::collect(const LevelLists& L, uint64_t j1, uint64_t j2, std::vector<uint64_t>& out) const {
    auto add = [&](uint64_t k) {
        for (uint64_t i = L.offsets[k]; i < L.offsets[k + 1]; ++i) out.push_back(L.values[i]);
    };
    uint64_t lo = j1 + L.leaves, hi = j2 + L.leaves + 1;
    while (lo < hi) {
        if (lo & 1) add(lo++);
        if (hi & 1) add(--hi);
        lo >>= 1;
        hi >>= 1;
    }
}

uint64_t FixedMajority::count_value(uint64_t w, const RectQuery& q) const {
    if (w >= g_->weight_bound()) return 0;
    uint64_t c = v_->value_rank(w);
    if (c >= v_->distinct() || v_->value_of(c) != w) return 0;
    return grids_.count(c, g_->map_rect(q));
}

std::vector<ValueCount> FixedMajority::query(const RectQuery& q, MajorityStats* stats) const {
    std::vector<ValueCount> out;
    RankRect r = g_->map_rect(q);
    uint64_t total = g_->count(r);
    if (total == 0) return out;
    unsigned L = g_->tree().depth();
    std::vector<uint64_t> cand;
    g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        unsigned d = v.level;
        uint64_t a = v.start + lo, b = v.start + hi;
        uint64_t jb = (a + block_ - 1) / block_, je = b / block_;
        if (d == L || jb >= je) {
            for (uint64_t p = a; p < b; ++p) cand.push_back(v_->rank_at(d, p));
            return;
        }
        for (uint64_t p = a; p < jb * block_; ++p) cand.push_back(v_->rank_at(d, p));
        collect(levels_[d], jb, je - 1, cand);
        for (uint64_t p = je * block_; p < b; ++p) cand.push_back(v_->rank_at(d, p));
    });
    if (stats) stats->candidates += cand.size();
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (uint64_t c : cand) {
        uint64_t f = grids_.count(c, r);
        if (alpha_.exceeded_by(f, total)) out.push_back({v_->value_of(c), f});
    }
    return out;
}

uint64_t FixedMajority::candidate_bits() const {
    uint64_t b = 0;
    for (const auto& l : levels_) b += l.bits();
    return b;
}

uint64_t FixedMajority::longest_list() const {
    uint64_t best = 0;
    for (const auto& l : levels_)
        for (uint64_t k = 0; k + 1 < l.offsets.size(); ++k) best = std::max(best, l.offsets[k + 1] - l.offsets[k]);
    return best;
}

void FixedMajority::save(ByteWriter& out) const {
    out.u64(alpha_.num);
    out.u64(alpha_.den);
    out.u64(t_);
    out.u64(block_);
    out.u64(levels_.size());
    for (const auto& l : levels_) {
        out.u64(l.leaves);
        l.offsets.save(out);
        l.values.save(out);
    }
    grids_.save(out);
}

FixedMajority FixedMajority::load(ByteReader& in, const RankGrid& g, const MinMaxAugmentation& values) {
    FixedMajority f;
    f.g_ = &g;
    f.v_ = &values;
    f.alpha_.num = in.u64();
    f.alpha_.den = in.u64();
    f.t_ = in.u64();
    f.block_ = in.u64();
    if (f.alpha_.num == 0 || f.alpha_.num >= f.alpha_.den || f.block_ == 0)
        throw Error(Errc::corrupt, "majority section header");
    uint64_t levels = in.u64();
    if (levels != g.tree().depth()) throw Error(Errc::corrupt, "majority section depth");
    for (uint64_t d = 0; d < levels; ++d) {
        LevelLists l;
        l.leaves = in.u64();
        l.offsets = IntVector::load(in);
        l.values = IntVector::load(in);
        if (l.offsets.size() != 2 * l.leaves + 1) throw Error(Errc::corrupt, "majority lists");
        f.levels_.push_back(std::move(l));
    }
    f.grids_ = PerValueGrids::load(in);
    return f;
}

}  // namespace wtgrid
