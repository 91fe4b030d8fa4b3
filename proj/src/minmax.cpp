#include <algorithm>
#include <queue>

#include "wtgrid/aligned_stats.hpp"

namespace wtgrid {

MinMaxAugmentation::MinMaxAugmentation(const RankGrid& g, uint64_t t, bool parallel) : r_(t) {
    if (t == 0) throw Error(Errc::invalid_argument, "t must be at least 1");
    bind(g);
    unsigned L = nav_.depth();
    uint64_t n = g.size();
    std::vector<uint64_t> distinct(n);
    for (uint64_t i = 0; i < n; ++i) distinct[i] = g.weight(i);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    m_ = distinct.size();
    marks_ = SparseBits(distinct, g.weight_bound());
    tau_ = t * std::max(1u, ceil_log2(m_));
    unsigned width = width_for(m_);

    auto seq = sequence_of(g.tree());
    rmq_min_.resize(L);
    rmq_max_.resize(L);
    ranks_.resize(L + 1);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (unsigned d = 0; d <= L; ++d) {
        auto order = level_order(seq, L, d);
        std::vector<uint64_t> rk(n);
        for (uint64_t p = 0; p < n; ++p)
            rk[p] = std::lower_bound(distinct.begin(), distinct.end(), g.weight(order[p])) - distinct.begin();
        if (d < L) {
            uint64_t nb = (n + r_ - 1) / r_;
            std::vector<uint64_t> lo(nb, UINT64_MAX), hi(nb, 0);
            for (uint64_t p = 0; p < n; ++p) {
                lo[p / r_] = std::min(lo[p / r_], rk[p]);
                hi[p / r_] = std::max(hi[p / r_], rk[p]);
            }
            rmq_min_[d] = BpRmq(lo, false);
            rmq_max_[d] = BpRmq(hi, true);
        }
        if (d > 0 && stores_level(d)) ranks_[d] = IntVector::from(rk, width);
    }
}

uint64_t MinMaxAugmentation::rank_at(unsigned d, uint64_t p) const {
    if (d == 0) return value_rank(g_->weight(p));
    while (!stores_level(d)) p = nav_.down(d++, p);
    return ranks_[d][p];
}

MinMaxAugmentation::Candidate MinMaxAugmentation::best_in_blocks(unsigned d, uint64_t j1, uint64_t j2,
                                                                 bool maximum) const {
    uint64_t j = (maximum ? rmq_max_[d] : rmq_min_[d]).query(j1, j2);
    Candidate best{0, d, UINT64_MAX};
    for (uint64_t p = j * r_; p < (j + 1) * r_; ++p) {
        uint64_t rk = rank_at(d, p);
        if (best.pos == UINT64_MAX || (maximum ? rk > best.rank : rk < best.rank)) best = {rk, d, p};
    }
    return best;
}

std::optional<WeightedHit> MinMaxAugmentation::extreme(const RankRect& r, bool maximum) const {
    if (r.empty()) return std::nullopt;
    bool found = false;
    uint64_t best_rank = 0, best_x = 0;
    g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        unsigned d = v.level;
        uint64_t a = v.start + lo, b = v.start + hi;
        // within a node positions follow x order, so the leftmost best wins
        Candidate c{0, d, UINT64_MAX};
        auto offer = [&](uint64_t rk, uint64_t p) {
            if (c.pos == UINT64_MAX || (maximum ? rk > c.rank : rk < c.rank) || (rk == c.rank && p < c.pos))
                c = {rk, d, p};
        };
        uint64_t jb = (a + r_ - 1) / r_, je = b / r_;
        if (d == nav_.depth() || jb >= je) {
            for (uint64_t p = a; p < b; ++p) offer(rank_at(d, p), p);
        } else {
            for (uint64_t p = a; p < jb * r_; ++p) offer(rank_at(d, p), p);
            Candidate blk = best_in_blocks(d, jb, je - 1, maximum);
            offer(blk.rank, blk.pos);
            for (uint64_t p = je * r_; p < b; ++p) offer(rank_at(d, p), p);
        }
        uint64_t x = nav_.to_root(d, c.pos);
        if (!found || better(c.rank, x, best_rank, best_x, maximum)) {
            found = true;
            best_rank = c.rank;
            best_x = x;
        }
    });
    if (!found) return std::nullopt;
    return WeightedHit{value_of(best_rank), g_->point_at(best_x)};
}

std::vector<WeightedHit> MinMaxAugmentation::top_k(const RectQuery& q, uint64_t k, bool largest,
                                                   TopkStats* stats) const {
    std::vector<WeightedHit> out;
    RankRect r = g_->map_rect(q);
    if (r.empty() || k == 0) return out;

    struct Entry {
        uint64_t rank, xrank;
        unsigned level;
        uint64_t pos;
        // block range still to split, or none when j1 > j2
        uint64_t j1, j2;
    };
    auto after = [&](const Entry& a, const Entry& b) { return better(b.rank, b.xrank, a.rank, a.xrank, largest); };
    std::priority_queue<Entry, std::vector<Entry>, decltype(after)> pq(after);
    uint64_t ops = 0;
    auto push = [&](Entry e) {
        ++ops;
        pq.push(e);
    };
    auto element = [&](unsigned d, uint64_t p) { push({rank_at(d, p), nav_.to_root(d, p), d, p, 1, 0}); };
    auto blocks = [&](unsigned d, uint64_t j1, uint64_t j2) {
        if (j1 > j2) return;
        Candidate c = best_in_blocks(d, j1, j2, largest);
        push({c.rank, nav_.to_root(d, c.pos), d, c.pos, j1, j2});
    };

    g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        unsigned d = v.level;
        uint64_t a = v.start + lo, b = v.start + hi;
        uint64_t jb = (a + r_ - 1) / r_, je = b / r_;
        if (d == nav_.depth() || jb >= je) {
            for (uint64_t p = a; p < b; ++p) element(d, p);
            return;
        }
        for (uint64_t p = a; p < jb * r_; ++p) element(d, p);
        blocks(d, jb, je - 1);
        for (uint64_t p = je * r_; p < b; ++p) element(d, p);
    });

    while (!pq.empty() && out.size() < k) {
        Entry e = pq.top();
        pq.pop();
        ++ops;
        out.push_back({value_of(e.rank), g_->point_at(e.xrank)});
        if (e.j1 > e.j2) continue;
        uint64_t j = e.pos / r_;
        if (j > e.j1) blocks(e.level, e.j1, j - 1);
        blocks(e.level, j + 1, e.j2);
        for (uint64_t p = j * r_; p < (j + 1) * r_; ++p)
            if (p != e.pos) element(e.level, p);
    }
    if (stats) stats->queue_ops += ops;
    return out;
}

MinMaxSpace MinMaxAugmentation::space() const {
    MinMaxSpace s;
    for (const auto& q : rmq_min_) s.rmq_min += q.bits();
    for (const auto& q : rmq_max_) s.rmq_max += q.bits();
    for (size_t d = 1; d < ranks_.size(); ++d) {
        if (d + 1 == ranks_.size())
            s.leaf_ranks += ranks_[d].bits();
        else
            s.explicit_ranks += ranks_[d].bits();
    }
    s.marks = marks_.bits();
    return s;
}

void MinMaxAugmentation::save(ByteWriter& out) const {
    out.u64(r_);
    out.u64(tau_);
    out.u64(m_);
    marks_.save(out);
    out.u64(rmq_min_.size());
    for (size_t d = 0; d < rmq_min_.size(); ++d) {
        rmq_min_[d].save(out);
        rmq_max_[d].save(out);
    }
    out.u64(ranks_.size());
    for (const auto& v : ranks_) v.save(out);
}

MinMaxAugmentation MinMaxAugmentation::load(ByteReader& in, const RankGrid& g) {
    MinMaxAugmentation s;
    s.bind(g);
    s.r_ = in.u64();
    s.tau_ = in.u64();
    s.m_ = in.u64();
    if (s.r_ == 0 || s.tau_ == 0) throw Error(Errc::corrupt, "min/max section header");
    s.marks_ = SparseBits::load(in);
    if (s.marks_.ones() != s.m_) throw Error(Errc::corrupt, "min/max value marks");
    uint64_t levels = in.u64();
    if (levels != s.nav_.depth()) throw Error(Errc::corrupt, "min/max section depth");
    for (uint64_t d = 0; d < levels; ++d) {
        s.rmq_min_.push_back(BpRmq::load(in));
        s.rmq_max_.push_back(BpRmq::load(in));
    }
    uint64_t nr = in.u64();
    if (nr != levels + 1) throw Error(Errc::corrupt, "min/max section ranks");
    for (uint64_t d = 0; d < nr; ++d) s.ranks_.push_back(IntVector::load(in));
    return s;
}

}  // namespace wtgrid
