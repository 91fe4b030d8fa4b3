#include "wtgrid/valuewt.hpp"

#include <algorithm>
#include <queue>

#include "wtgrid/levels.hpp"

namespace wtgrid {

ValueWaveletTree::ValueWaveletTree(const RankGrid& g, const MinMaxAugmentation& values, uint64_t ell, bool parallel)
    : g_(&g), v_(&values), ell_(ell) {
    if (ell < 2) throw Error(Errc::invalid_argument, "ell must be at least 2");
    step_ = std::max(1u, ceil_log2(ell));
    uint64_t n = g.size(), sigma = std::max<uint64_t>(values.distinct(), 1);
    std::vector<uint64_t> vx(n), vy(n);
    for (uint64_t i = 0; i < n; ++i) {
        vx[i] = values.value_rank(g.weight(i));
        vy[g.yrank(i)] = vx[i];
    }
    xt_ = WaveletTree(vx, sigma, parallel);
    yt_ = WaveletTree(vy, sigma, parallel);
    unsigned H = xt_.depth();
    grids_.resize(H + 1);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (unsigned d = 1; d <= H; ++d) {
        if (!has_grid(d)) continue;
        auto ox = level_order(vx, H, d), oy = level_order(vy, H, d);
        std::vector<uint64_t> pos_y(n), seq(n);
        for (uint64_t p = 0; p < n; ++p) pos_y[oy[p]] = p;
        for (uint64_t p = 0; p < n; ++p) seq[p] = pos_y[g.yrank(ox[p])];
        grids_[d] = WaveletTree(seq, std::max<uint64_t>(n, 1));
    }
}

ValueWaveletTree::Frame ValueWaveletTree::root_frame(const RankRect& r) const {
    if (r.empty()) return {xt_.root(), yt_.root(), 0, 0, 0, 0};
    return {xt_.root(), yt_.root(), r.x0, r.x1 + 1, r.y0, r.y1 + 1};
}

ValueWaveletTree::Frame ValueWaveletTree::child(const Frame& f, bool b) const {
    return {xt_.child(f.xv, b), yt_.child(f.yv, b),
            xt_.local_rank(f.xv, b, f.x0), xt_.local_rank(f.xv, b, f.x1),
            yt_.local_rank(f.yv, b, f.y0), yt_.local_rank(f.yv, b, f.y1)};
}

uint64_t ValueWaveletTree::count(const Frame& f, ValueStats* stats) const {
    if (f.empty()) return 0;
    if (stats) ++stats->grid_counts;
    if (f.xv.level == 0) return g_->count(RankRect{f.x0, f.x1 - 1, f.y0, f.y1 - 1});
    uint64_t s = f.xv.start;
    return grids_[f.xv.level].count_range(s + f.x0, s + f.x1, s + f.y0, s + f.y1 - 1);
}

template <typename Fn>
void ValueWaveletTree::next_grid_level(const Frame& f, Fn&& fn) const {
    unsigned target = std::min(depth(), (f.xv.level / step_ + 1) * step_);
    auto rec = [&](auto&& self, const Frame& c) -> bool {
        if (c.empty()) return false;
        if (c.xv.level == target) return fn(c);
        return self(self, child(c, false)) || self(self, child(c, true));
    };
    rec(rec, f);
}

ValueCount ValueWaveletTree::quantile_ranks(const Frame& root, uint64_t k, ValueStats* stats) const {
    Frame f = root;
    uint64_t cnt = 0;
    if (depth() == 0) return {0, count(root, stats)};
    while (f.xv.level < depth()) {
        bool found = false;
        next_grid_level(f, [&](const Frame& c) {
            uint64_t here = count(c, stats);
            if (here >= k) {
                f = c;
                cnt = here;
                return found = true;
            }
            k -= here;
            return false;
        });
        if (!found) throw Error(Errc::corrupt, "quantile descent lost its rank");
    }
    return {f.xv.label, cnt};
}

ValueCount ValueWaveletTree::quantile(const RectQuery& q, uint64_t k, ValueStats* stats) const {
    Frame root = root_frame(g_->map_rect(q));
    uint64_t c = count(root, stats);
    if (c == 0) throw Error(Errc::empty_range, "quantile of empty rectangle");
    if (k == 0 || k > c) throw Error(Errc::out_of_range, "quantile rank out of range");
    auto r = quantile_ranks(root, k, stats);
    return {v_->value_of(r.value), r.count};
}

uint64_t ValueWaveletTree::count_ranks(const Frame& f, uint64_t c0, uint64_t c1, ValueStats* stats) const {
    if (f.empty() || c0 > c1) return 0;
    uint64_t lo = xt_.sym_lo(f.xv), hi = xt_.sym_hi(f.xv);
    if (hi < c0 || lo > c1) return 0;
    unsigned d = f.xv.level;
    if (c0 <= lo && hi <= c1 && (d == 0 || has_grid(d))) return count(f, stats);
    return count_ranks(child(f, false), c0, c1, stats) + count_ranks(child(f, true), c0, c1, stats);
}

namespace {
// Value ranks below w.
uint64_t ranks_below(const MinMaxAugmentation& v, uint64_t W, uint64_t w) {
    return w >= W ? v.distinct() : v.value_rank(w);
}
}  // namespace

uint64_t ValueWaveletTree::count_value_range(const RectQuery& q, uint64_t w0, uint64_t w1, ValueStats* stats) const {
    if (w0 > w1) return 0;
    uint64_t W = g_->weight_bound();
    uint64_t c0 = ranks_below(*v_, W, w0), c1 = w1 >= W ? v_->distinct() : ranks_below(*v_, W, w1 + 1);
    if (c0 >= c1) return 0;
    return count_ranks(root_frame(g_->map_rect(q)), c0, c1 - 1, stats);
}

std::optional<uint64_t> ValueWaveletTree::first_present(const Frame& f, uint64_t c0, uint64_t c1, bool leftmost,
                                                        ValueStats* stats) const {
    if (f.empty()) return std::nullopt;
    uint64_t lo = xt_.sym_lo(f.xv), hi = xt_.sym_hi(f.xv);
    if (hi < c0 || lo > c1) return std::nullopt;
    unsigned d = f.xv.level;
    if ((d == 0 || has_grid(d)) && count(f, stats) == 0) return std::nullopt;
    if (d == depth()) return f.xv.label;
    for (bool b : {!leftmost, leftmost})
        if (auto r = first_present(child(f, b), c0, c1, leftmost, stats)) return r;
    return std::nullopt;
}

std::optional<uint64_t> ValueWaveletTree::successor(const RectQuery& q, uint64_t w, ValueStats* stats) const {
    uint64_t c0 = ranks_below(*v_, g_->weight_bound(), w);
    if (c0 >= v_->distinct()) return std::nullopt;
    auto r = first_present(root_frame(g_->map_rect(q)), c0, v_->distinct() - 1, true, stats);
    if (!r) return std::nullopt;
    return v_->value_of(*r);
}

std::optional<uint64_t> ValueWaveletTree::predecessor(const RectQuery& q, uint64_t w, ValueStats* stats) const {
    uint64_t W = g_->weight_bound();
    uint64_t c1 = w >= W ? v_->distinct() : ranks_below(*v_, W, w + 1);
    if (c1 == 0) return std::nullopt;
    auto r = first_present(root_frame(g_->map_rect(q)), 0, c1 - 1, false, stats);
    if (!r) return std::nullopt;
    return v_->value_of(*r);
}

std::vector<ValueCount> ValueWaveletTree::majority(const RectQuery& q, Fraction alpha, ValueStats* stats) const {
    std::vector<ValueCount> out;
    Frame root = root_frame(g_->map_rect(q));
    uint64_t c = count(root, stats);
    if (c == 0) return out;
    std::vector<uint64_t> probes;
    if (2 * alpha.num >= alpha.den) {
        probes.push_back((c + 1) / 2);
    } else {
        for (uint64_t i = 1;; ++i) {
            u128 num = u128(i) * alpha.num * c;
            auto p = static_cast<uint64_t>((num + alpha.den - 1) / alpha.den);
            if (p > c) break;
            probes.push_back(p);
        }
    }
    std::vector<ValueCount> seen;
    for (uint64_t p : probes) {
        if (stats) ++stats->probes;
        auto r = quantile_ranks(root, p, stats);
        if (std::none_of(seen.begin(), seen.end(), [&](const ValueCount& s) { return s.value == r.value; }))
            seen.push_back(r);
    }
    for (const auto& r : seen)
        if (alpha.exceeded_by(r.count, c)) out.push_back({v_->value_of(r.value), r.count});
    std::sort(out.begin(), out.end(), [](const ValueCount& a, const ValueCount& b) { return a.value < b.value; });
    return out;
}

std::vector<ValueCount> ValueWaveletTree::top_k_frequent(const RectQuery& q, uint64_t k, ValueStats* stats) const {
    if (k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
    std::vector<ValueCount> found;
    Frame root = root_frame(g_->map_rect(q));
    uint64_t c = count(root, stats);
    if (c == 0) return found;
    // unexplored stretches [a, b] of sorted positions, longest first
    using Gap = std::pair<uint64_t, uint64_t>;
    auto longer = [](const Gap& x, const Gap& y) { return x.second - x.first < y.second - y.first; };
    std::priority_queue<Gap, std::vector<Gap>, decltype(longer)> gaps(longer);
    std::priority_queue<uint64_t, std::vector<uint64_t>, std::greater<>> best;  // k largest counts so far
    gaps.push({1, c});
    while (!gaps.empty()) {
        auto [a, b] = gaps.top();
        // a value hidden in [a, b] occurs at most b - a + 1 times; equal
        // lengths still matter since ties go to the smaller value
        if (best.size() == k && b - a + 1 < best.top()) break;
        gaps.pop();
        if (stats) ++stats->probes;
        auto r = quantile_ranks(root, a + (b - a) / 2, stats);
        uint64_t first = 1 + (r.value == 0 ? 0 : count_ranks(root, 0, r.value - 1, stats));
        uint64_t last = first + r.count - 1;
        if (a < first) gaps.push({a, first - 1});
        if (last < b) gaps.push({last + 1, b});
        found.push_back(r);
        best.push(r.count);
        if (best.size() > k) best.pop();
    }
    std::sort(found.begin(), found.end(), [](const ValueCount& x, const ValueCount& y) {
        return x.count != y.count ? x.count > y.count : x.value < y.value;
    });
    if (found.size() > k) found.resize(k);
    for (auto& f : found) f.value = v_->value_of(f.value);
    return found;
}

std::optional<ValueCount> ValueWaveletTree::mode(const RectQuery& q, ValueStats* stats) const {
    auto r = top_k_frequent(q, 1, stats);
    if (r.empty()) return std::nullopt;
    return r[0];
}

uint64_t ValueWaveletTree::grid_bits() const {
    uint64_t b = 0;
    for (const auto& t : grids_) b += t.bits();
    return b;
}

void ValueWaveletTree::save(ByteWriter& out) const {
    out.u64(ell_);
    xt_.save(out);
    yt_.save(out);
    for (unsigned d = 1; d <= depth(); ++d)
        if (has_grid(d)) grids_[d].save(out);
}

ValueWaveletTree ValueWaveletTree::load(ByteReader& in, const RankGrid& g, const MinMaxAugmentation& values) {
    ValueWaveletTree t;
    t.g_ = &g;
    t.v_ = &values;
    t.ell_ = in.u64();
    if (t.ell_ < 2) throw Error(Errc::corrupt, "value tree ell");
    t.step_ = std::max(1u, ceil_log2(t.ell_));
    t.xt_ = WaveletTree::load(in);
    t.yt_ = WaveletTree::load(in);
    if (t.xt_.size() != g.size() || t.yt_.size() != g.size() || t.xt_.depth() != t.yt_.depth() ||
        t.xt_.sigma() != std::max<uint64_t>(values.distinct(), 1))
        throw Error(Errc::corrupt, "value tree shape");
    t.grids_.resize(t.depth() + 1);
    for (unsigned d = 1; d <= t.depth(); ++d)
        if (t.has_grid(d)) {
            t.grids_[d] = WaveletTree::load(in);
            if (t.grids_[d].size() != g.size()) throw Error(Errc::corrupt, "value tree grid");
        }
    return t;
}

}  // namespace wtgrid
