#include "wtgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wtgrid {

void WeightedPointSet::validate() const {
    if (U == 0 || W == 0) throw Error(Errc::data, "universe and weight bounds must be positive");
    for (uint64_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.x >= U || p.y >= U) throw Error(Errc::data, "point " + std::to_string(i) + " outside universe");
        if (p.w >= W) throw Error(Errc::data, "point " + std::to_string(i) + " weight outside bound");
    }
}

CoordMap::CoordMap(const std::vector<uint64_t>& sorted, uint64_t universe) : n_(sorted.size()), u_(universe) {
    if (n_ == 0) return;
    std::vector<uint64_t> pos(n_);
    for (uint64_t i = 0; i < n_; ++i) pos[i] = sorted[i] + i;
    bits_ = SparseBits(pos, u_ + n_);
}

uint64_t CoordMap::count_le(uint64_t v) const {
    if (n_ == 0) return 0;
    if (v >= u_) return n_;
    // ones before the (v+1)-th zero
    return bits_.select0(v + 1) - v;
}

void CoordMap::save(ByteWriter& out) const {
    out.u64(n_);
    out.u64(u_);
    if (n_) bits_.save(out);
}

CoordMap CoordMap::load(ByteReader& in) {
    CoordMap m;
    m.n_ = in.u64();
    m.u_ = in.u64();
    if (m.n_) {
        m.bits_ = SparseBits::load(in);
        if (m.bits_.ones() != m.n_ || m.bits_.size() != m.u_ + m.n_) throw Error(Errc::corrupt, "coordinate map");
    }
    return m;
}

RankGrid::RankGrid(const WeightedPointSet& ps, bool parallel) : n_(ps.points.size()), U_(ps.U), W_(ps.W) {
    ps.validate();
    const auto& P = ps.points;
    std::vector<uint64_t> byx(n_), byy(n_);
    std::iota(byx.begin(), byx.end(), 0);
    std::iota(byy.begin(), byy.end(), 0);
    std::sort(byx.begin(), byx.end(), [&](uint64_t a, uint64_t b) {
        return std::tie(P[a].x, P[a].y, a) < std::tie(P[b].x, P[b].y, b);
    });
    std::sort(byy.begin(), byy.end(), [&](uint64_t a, uint64_t b) {
        return std::tie(P[a].y, P[a].x, a) < std::tie(P[b].y, P[b].x, b);
    });
    std::vector<uint64_t> yrank_of(n_), xs(n_), ys(n_);
    for (uint64_t r = 0; r < n_; ++r) {
        yrank_of[byy[r]] = r;
        xs[r] = P[byx[r]].x;
        ys[r] = P[byy[r]].y;
    }
    std::vector<uint64_t> seq(n_);
    weights_ = IntVector(n_, width_for(W_));
    for (uint64_t r = 0; r < n_; ++r) {
        seq[r] = yrank_of[byx[r]];
        weights_.set(r, P[byx[r]].w);
    }
    xmap_ = CoordMap(xs, U_);
    ymap_ = CoordMap(ys, U_);
    tree_ = WaveletTree(seq, std::max<uint64_t>(n_, 1), parallel);
}

RankRect RankGrid::map_rect(const RectQuery& q) const {
    if (n_ == 0 || q.x0 > q.x1 || q.y0 > q.y1) return {};
    uint64_t a = xmap_.count_lt(q.x0), b = xmap_.count_le(q.x1);
    uint64_t c = ymap_.count_lt(q.y0), d = ymap_.count_le(q.y1);
    if (a >= b || c >= d) return {};
    return {a, b - 1, c, d - 1};
}

uint64_t RankGrid::count(const RankRect& r) const {
    if (r.empty()) return 0;
    return tree_.count_range(r.x0, r.x1 + 1, r.y0, r.y1);
}

std::vector<std::pair<uint64_t, uint64_t>> RankGrid::report_ranks(const RankRect& r) const {
    std::vector<std::pair<uint64_t, uint64_t>> out;
    if (r.empty()) return out;
    auto rec = [&](auto&& self, const WtNode& v, uint64_t lo, uint64_t hi) -> void {
        if (lo >= hi || tree_.sym_lo(v) > r.y1 || tree_.sym_hi(v) < r.y0) return;
        if (tree_.is_leaf(v)) {
            out.emplace_back(xrank(v.label), v.label);
            return;
        }
        uint64_t z0 = tree_.local_rank(v, false, lo), z1 = tree_.local_rank(v, false, hi);
        self(self, tree_.child(v, true), lo - z0, hi - z1);
        self(self, tree_.child(v, false), z0, z1);
    };
    rec(rec, tree_.root(), r.x0, r.x1 + 1);
    return out;
}

std::vector<Point> RankGrid::report(const RectQuery& q) const {
    std::vector<Point> out;
    for (auto [xr, yr] : report_ranks(map_rect(q))) out.push_back({xmap_.at(xr), ymap_.at(yr), weight(xr)});
    return out;
}

double log2_factorial(double n) { return n <= 1 ? 0.0 : std::lgamma(n + 1) / std::log(2.0); }

double log2_binomial(double n, double k) {
    if (k < 0 || k > n) return 0.0;
    return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k);
}

SpaceReport RankGrid::space_report() const {
    SpaceReport s;
    s.n = n_;
    if (n_ == 0) return s;
    s.x_map_bits = xmap_.bits();
    s.y_map_bits = ymap_.bits();
    s.tree_bits = tree_.bits();
    s.weight_bits = weights_.bits();
    double n = double(n_), U = double(U_);
    s.optimal_bits = log2_factorial(n) + 2 * log2_binomial(U + n, n);
    s.alternative_bits = log2_binomial(U * U, n) + 2 * n;
    return s;
}

void RankGrid::save(ByteWriter& out) const {
    out.u64(n_);
    out.u64(U_);
    out.u64(W_);
    xmap_.save(out);
    ymap_.save(out);
    tree_.save(out);
    weights_.save(out);
}

RankGrid RankGrid::load(ByteReader& in) {
    RankGrid g;
    g.n_ = in.u64();
    g.U_ = in.u64();
    g.W_ = in.u64();
    g.xmap_ = CoordMap::load(in);
    g.ymap_ = CoordMap::load(in);
    g.tree_ = WaveletTree::load(in);
    g.weights_ = IntVector::load(in);
    if (g.xmap_.size() != g.n_ || g.ymap_.size() != g.n_ || g.tree_.size() != g.n_ || g.weights_.size() != g.n_)
        throw Error(Errc::corrupt, "grid section sizes disagree");
    return g;
}

}  // namespace wtgrid
