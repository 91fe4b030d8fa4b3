#include "wtgrid/dynamic.hpp"

#include <algorithm>

#include "wtgrid/int_vector.hpp"
#include "wtgrid/levels.hpp"

namespace wtgrid {

// ---------------------------------------------------------------- wavelet

DynamicWavelet::DynamicWavelet(uint64_t sigma)
    : sigma_(std::max<uint64_t>(sigma, 1)), depth_(ceil_log2(sigma_)), levels_(depth_) {}

uint64_t DynamicWavelet::to_root(const WtNode& v, uint64_t i) const {
    std::vector<WtNode> chain{root()};
    for (unsigned d = 0; d < v.level; ++d) chain.push_back(child(chain.back(), (v.label >> (v.level - 1 - d)) & 1));
    for (unsigned d = v.level; d > 0; --d) i = local_select(chain[d - 1], chain[d].label & 1, i + 1);
    return i;
}

uint64_t DynamicWavelet::access(uint64_t i) const {
    if (i >= n_) throw Error(Errc::out_of_range, "access beyond size");
    WtNode v = root();
    uint64_t c = 0;
    for (unsigned d = 0; d < depth_; ++d) {
        bool b = levels_[d][v.start + i];
        i = local_rank(v, b, i);
        v = child(v, b);
        c = (c << 1) | b;
    }
    return c;
}

std::vector<uint64_t> DynamicWavelet::insert(uint64_t i, uint64_t c) {
    if (c >= sigma_) throw Error(Errc::out_of_range, "symbol beyond alphabet");
    if (i > n_) throw Error(Errc::out_of_range, "insert position out of range");
    std::vector<uint64_t> pos(depth_ + 1);
    uint64_t start = 0, size = n_;
    for (unsigned d = 0; d < depth_; ++d) {
        bool b = (c >> (depth_ - 1 - d)) & 1;
        DynamicBits& L = levels_[d];
        uint64_t before = L.rank1(start);
        uint64_t zeros = size - (L.rank1(start + size) - before);
        uint64_t ones_to_i = L.rank1(start + i) - before;
        uint64_t next = b ? ones_to_i : i - ones_to_i;
        L.insert(start + i, b);
        pos[d] = start + i;
        if (b) {
            start += zeros;
            size -= zeros;
        } else {
            size = zeros;
        }
        i = next;
    }
    pos[depth_] = start + i;
    ++n_;
    return pos;
}

std::pair<uint64_t, std::vector<uint64_t>> DynamicWavelet::erase(uint64_t i) {
    if (i >= n_) throw Error(Errc::out_of_range, "erase position out of range");
    std::vector<uint64_t> pos(depth_ + 1);
    uint64_t start = 0, size = n_, c = 0;
    for (unsigned d = 0; d < depth_; ++d) {
        DynamicBits& L = levels_[d];
        bool b = L[start + i];
        uint64_t before = L.rank1(start);
        uint64_t zeros = size - (L.rank1(start + size) - before);
        uint64_t ones_to_i = L.rank1(start + i) - before;
        uint64_t next = b ? ones_to_i : i - ones_to_i;
        L.erase(start + i);
        pos[d] = start + i;
        if (b) {
            start += zeros;
            size -= zeros;
        } else {
            size = zeros;
        }
        i = next;
        c = (c << 1) | b;
    }
    pos[depth_] = start + i;
    --n_;
    return {c, pos};
}

uint64_t DynamicWavelet::count_range(uint64_t x0, uint64_t x1, uint64_t y0, uint64_t y1) const {
    uint64_t c = 0;
    for_each_cover(x0, x1, y0, y1, [&](const WtNode&, uint64_t lo, uint64_t hi) { c += hi - lo; });
    return c;
}

uint64_t DynamicWavelet::bits() const {
    uint64_t b = 0;
    for (const auto& L : levels_) b += L.bits();
    return b;
}

void DynamicWavelet::audit() const {
    for (const auto& L : levels_) {
        L.audit();
        if (L.size() != n_) throw Error(Errc::corrupt, "level length differs from point count");
    }
}

// ---------------------------------------------------------------- blocks

namespace {

RangeAgg shifted(RangeAgg a, uint64_t by) {
    a.min_pos += by;
    a.max_pos += by;
    return a;
}

RangeAgg single(uint64_t w, uint64_t pos) { return {1, w, w * w, w, w, pos, pos}; }

}  // namespace

void RangeAgg::add(const RangeAgg& o) {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    count += o.count;
    sum += o.sum;
    squares += o.squares;
    if (o.min < min) {
        min = o.min;
        min_pos = o.min_pos;
    }
    if (o.max > max) {
        max = o.max;
        max_pos = o.max_pos;
    }
}

int32_t WeightBlocks::make_node() {
    int32_t t;
    if (!free_.empty()) {
        t = free_.back();
        free_.pop_back();
        pool_[t] = Node{};
    } else {
        t = static_cast<int32_t>(pool_.size());
        pool_.emplace_back();
    }
    rng_ ^= rng_ << 13;
    rng_ ^= rng_ >> 7;
    rng_ ^= rng_ << 17;
    pool_[t].pri = static_cast<uint32_t>(rng_ >> 32);
    return t;
}

void WeightBlocks::pull(int32_t t) {
    Node& n = pool_[t];
    RangeAgg s;
    uint64_t at = 0;
    n.blocks = 1;
    if (n.l >= 0) {
        s.add(pool_[n.l].sub);
        at = pool_[n.l].sub.count;
        n.blocks += pool_[n.l].blocks;
    }
    s.add(shifted(n.own, at));
    at += n.vals.size();
    if (n.r >= 0) {
        s.add(shifted(pool_[n.r].sub, at));
        n.blocks += pool_[n.r].blocks;
    }
    n.sub = s;
}

void WeightBlocks::split(int32_t t, uint64_t k, int32_t& a, int32_t& b) {
    if (t < 0) {
        a = b = -1;
        return;
    }
    uint64_t lb = pool_[t].l < 0 ? 0 : pool_[pool_[t].l].blocks;
    if (k <= lb) {
        split(pool_[t].l, k, a, pool_[t].l);
        b = t;
    } else {
        split(pool_[t].r, k - lb - 1, pool_[t].r, b);
        a = t;
    }
    pull(t);
}

int32_t WeightBlocks::merge(int32_t a, int32_t b) {
    if (a < 0) return b;
    if (b < 0) return a;
    if (pool_[a].pri > pool_[b].pri) {
        pool_[a].r = merge(pool_[a].r, b);
        pull(a);
        return a;
    }
    pool_[b].l = merge(a, pool_[b].l);
    pull(b);
    return b;
}

int32_t WeightBlocks::block_path(uint64_t k, std::vector<int32_t>& path) const {
    path.clear();
    int32_t t = root_;
    while (t >= 0) {
        path.push_back(t);
        const Node& n = pool_[t];
        uint64_t lb = n.l < 0 ? 0 : pool_[n.l].blocks;
        if (k < lb) {
            t = n.l;
        } else if (k == lb) {
            return t;
        } else {
            k -= lb + 1;
            t = n.r;
        }
    }
    throw Error(Errc::corrupt, "block index out of range");
}

void WeightBlocks::touch(int32_t t, const std::vector<int32_t>& path) {
    Node& n = pool_[t];
    RangeAgg own;
    for (uint64_t p = 0; p < n.vals.size(); ++p) own.add(single(n.vals[p], p));
    n.own = own;
    for (auto it = path.rbegin(); it != path.rend(); ++it) pull(*it);
}

void WeightBlocks::insert_block(uint64_t k) {
    int32_t u = make_node();
    pull(u);
    int32_t a, b;
    split(root_, k, a, b);
    root_ = merge(merge(a, u), b);
}

void WeightBlocks::remove_block(uint64_t k) {
    int32_t a, m, b, x;
    split(root_, k, a, m);
    split(m, 1, x, b);
    free_.push_back(x);
    root_ = merge(a, b);
}

void WeightBlocks::move_right(uint64_t k) {
    std::vector<int32_t> path;
    int32_t a = block_path(k, path);
    uint64_t w = pool_[a].vals.back();
    pool_[a].vals.pop_back();
    touch(a, path);
    int32_t b = block_path(k + 1, path);
    pool_[b].vals.insert(pool_[b].vals.begin(), w);
    touch(b, path);
}

void WeightBlocks::move_left(uint64_t k) {
    std::vector<int32_t> path;
    int32_t b = block_path(k + 1, path);
    uint64_t w = pool_[b].vals.front();
    pool_[b].vals.erase(pool_[b].vals.begin());
    touch(b, path);
    int32_t a = block_path(k, path);
    pool_[a].vals.push_back(w);
    touch(a, path);
}

uint64_t WeightBlocks::get(uint64_t pos) const {
    if (pos >= size()) throw Error(Errc::out_of_range, "weight position out of range");
    int32_t t = root_;
    for (;;) {
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].sub.count;
        if (pos < ls) {
            t = n.l;
            continue;
        }
        pos -= ls;
        if (pos < n.vals.size()) return n.vals[pos];
        pos -= n.vals.size();
        t = n.r;
    }
}

void WeightBlocks::insert(uint64_t pos, uint64_t w) {
    if (pos > size()) throw Error(Errc::out_of_range, "weight position out of range");
    if (root_ < 0) insert_block(0);
    std::vector<int32_t> path;
    int32_t t = root_;
    uint64_t k = 0;
    for (;;) {
        path.push_back(t);
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].sub.count;
        if (n.l >= 0 && pos <= ls) {
            t = n.l;
            continue;
        }
        pos -= ls;
        k += n.l < 0 ? 0 : pool_[n.l].blocks;
        if (pos <= n.vals.size()) break;
        pos -= n.vals.size();
        ++k;
        t = n.r;
    }
    pool_[t].vals.insert(pool_[t].vals.begin() + static_cast<int64_t>(pos), w);
    touch(t, path);
    if (pool_[t].vals.size() <= 2 * tau_) return;
    auto len = [&](uint64_t j) {
        std::vector<int32_t> p;
        return pool_[block_path(j, p)].vals.size();
    };
    uint64_t nb = blocks();
    if (k + 1 < nb && len(k + 1) < 2 * tau_) {
        move_right(k);
    } else if (k > 0 && len(k - 1) < 2 * tau_) {
        move_left(k - 1);
    } else {
        insert_block(k + 1);
        move_right(k);
    }
}

void WeightBlocks::repair_pair(uint64_t k) {
    if (k + 1 >= blocks()) return;
    std::vector<int32_t> p;
    uint64_t a = pool_[block_path(k, p)].vals.size(), b = pool_[block_path(k + 1, p)].vals.size();
    if (a + b >= tau_) return;
    // drain block k + 1 into block k one value at a time
    for (uint64_t i = 0; i < b; ++i) move_left(k);
    remove_block(k + 1);
    repair_pair(k);
    if (k > 0) repair_pair(k - 1);
}

uint64_t WeightBlocks::erase(uint64_t pos) {
    if (pos >= size()) throw Error(Errc::out_of_range, "weight position out of range");
    std::vector<int32_t> path;
    int32_t t = root_;
    uint64_t k = 0;
    for (;;) {
        path.push_back(t);
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].sub.count;
        if (pos < ls) {
            t = n.l;
            continue;
        }
        pos -= ls;
        k += n.l < 0 ? 0 : pool_[n.l].blocks;
        if (pos < n.vals.size()) break;
        pos -= n.vals.size();
        ++k;
        t = n.r;
    }
    uint64_t w = pool_[t].vals[pos];
    pool_[t].vals.erase(pool_[t].vals.begin() + static_cast<int64_t>(pos));
    touch(t, path);
    if (pool_[t].vals.empty()) {
        remove_block(k);
        if (k > 0) repair_pair(k - 1);
    } else {
        repair_pair(k);
        if (k > 0) repair_pair(k - 1);
    }
    return w;
}

RangeAgg WeightBlocks::range_rec(int32_t t, uint64_t a, uint64_t b, uint64_t base) const {
    RangeAgg res;
    if (t < 0 || a >= b) return res;
    const Node& n = pool_[t];
    if (a == 0 && b == n.sub.count) return shifted(n.sub, base);
    uint64_t ls = n.l < 0 ? 0 : pool_[n.l].sub.count, len = n.vals.size();
    if (a < ls) res.add(range_rec(n.l, a, std::min(b, ls), base));
    uint64_t oa = std::max(a, ls), ob = std::min(b, ls + len);
    if (oa < ob) {
        if (oa == ls && ob == ls + len) {
            res.add(shifted(n.own, base + ls));
        } else {
            for (uint64_t p = oa; p < ob; ++p) res.add(single(n.vals[p - ls], base + p));
        }
    }
    if (b > ls + len) res.add(range_rec(n.r, std::max(a, ls + len) - ls - len, b - ls - len, base + ls + len));
    return res;
}

RangeAgg WeightBlocks::range(uint64_t a, uint64_t b) const {
    if (b > size() || a > b) throw Error(Errc::out_of_range, "weight range out of bounds");
    return range_rec(root_, a, b, 0);
}

std::vector<uint64_t> WeightBlocks::values() const {
    std::vector<uint64_t> out;
    auto rec = [&](auto&& self, int32_t t) -> void {
        if (t < 0) return;
        self(self, pool_[t].l);
        out.insert(out.end(), pool_[t].vals.begin(), pool_[t].vals.end());
        self(self, pool_[t].r);
    };
    rec(rec, root_);
    return out;
}

std::vector<uint64_t> WeightBlocks::block_lengths() const {
    std::vector<uint64_t> out;
    auto rec = [&](auto&& self, int32_t t) -> void {
        if (t < 0) return;
        self(self, pool_[t].l);
        out.push_back(pool_[t].vals.size());
        self(self, pool_[t].r);
    };
    rec(rec, root_);
    return out;
}

uint64_t WeightBlocks::bits() const {
    uint64_t b = 0;
    auto rec = [&](auto&& self, int32_t t) -> void {
        if (t < 0) return;
        b += 64 * pool_[t].vals.size() + 8 * sizeof(Node);
        self(self, pool_[t].l);
        self(self, pool_[t].r);
    };
    rec(rec, root_);
    return b;
}

void WeightBlocks::audit() const {
    auto rec = [&](auto&& self, int32_t t, uint32_t parent_pri) -> void {
        if (t < 0) return;
        const Node& n = pool_[t];
        if (n.pri > parent_pri) throw Error(Errc::corrupt, "block treap heap order broken");
        self(self, n.l, n.pri);
        self(self, n.r, n.pri);
        RangeAgg own, sub;
        for (uint64_t p = 0; p < n.vals.size(); ++p) own.add(single(n.vals[p], p));
        uint64_t at = 0, blocks = 1;
        if (n.l >= 0) {
            sub.add(pool_[n.l].sub);
            at = pool_[n.l].sub.count;
            blocks += pool_[n.l].blocks;
        }
        sub.add(shifted(own, at));
        if (n.r >= 0) {
            sub.add(shifted(pool_[n.r].sub, at + n.vals.size()));
            blocks += pool_[n.r].blocks;
        }
        auto same = [](const RangeAgg& x, const RangeAgg& y) {
            return x.count == y.count && x.sum == y.sum && x.squares == y.squares &&
                   (x.count == 0 || (x.min == y.min && x.max == y.max && x.min_pos == y.min_pos &&
                                     x.max_pos == y.max_pos));
        };
        if (!same(own, n.own) || !same(sub, n.sub) || blocks != n.blocks)
            throw Error(Errc::corrupt, "block aggregates stale");
    };
    rec(rec, root_, UINT32_MAX);
    auto lens = block_lengths();
    for (uint64_t j = 0; j < lens.size(); ++j) {
        if (lens[j] == 0 || lens[j] > 2 * tau_) throw Error(Errc::corrupt, "block length out of bounds");
        if (j + 1 < lens.size() && lens[j] + lens[j + 1] < tau_) throw Error(Errc::corrupt, "neighbouring blocks too short");
    }
}

// ---------------------------------------------------------------- order

uint64_t PointOrder::insert(const PointKey& k, uint64_t w) {
    tree_.insert({k, w});
    return tree_.order_of_key(k);
}

std::optional<std::pair<PointKey, uint64_t>> PointOrder::newest(uint64_t x, uint64_t y) const {
    auto it = tree_.lower_bound(PointKey{x, y + 1, 0});
    if (it == tree_.begin()) return std::nullopt;
    --it;
    if (it->first.x != x || it->first.y != y) return std::nullopt;
    return std::pair{it->first, it->second};
}

std::pair<uint64_t, uint64_t> PointOrder::x_range(uint64_t x0, uint64_t x1) const {
    uint64_t lo = tree_.order_of_key(PointKey{x0, 0, 0});
    uint64_t hi = x1 == UINT64_MAX ? tree_.size() : tree_.order_of_key(PointKey{x1 + 1, 0, 0});
    return {lo, std::max(lo, hi)};
}

std::vector<std::pair<PointKey, uint64_t>> PointOrder::all() const {
    std::vector<std::pair<PointKey, uint64_t>> out;
    for (const auto& e : tree_) out.emplace_back(e.first, e.second);
    return out;
}

// ---------------------------------------------------------------- grid

namespace {

void check_point(const Point& p, uint64_t U, uint64_t W) {
    if (p.x >= U || p.y >= U) throw Error(Errc::out_of_range, "point outside the universe");
    if (p.w >= W) throw Error(Errc::out_of_range, "weight outside bound");
}

void check_bounds(uint64_t U, uint64_t W) {
    if (U == 0 || W == 0) throw Error(Errc::invalid_argument, "universe and weight bound must be positive");
    if (W > (uint64_t(1) << 32)) throw Error(Errc::invalid_argument, "weight bound above 2^32");
}

// Dynamic leaves hold every point of a y in (x, sequence) order: westward
// scans keep the last of them, eastward scans the first.
struct DynamicPolicy {
    const PointOrder& order;

    SweepPick pick(const Sweep<DynamicWavelet>& sw, const Sweep<DynamicWavelet>::Hit& h, Direction dir, uint64_t,
                   uint64_t) const {
        bool last = dir == Direction::SW || dir == Direction::NW;
        uint64_t y = h.leaf.label;
        return {sw.up(last ? h.hi - 1 : h.lo), y, y, y};
    }
    uint64_t x_group_first(uint64_t pos) const { return order.x_range(order.at(pos).first.x, order.at(pos).first.x).first; }
    uint64_t x_group_last(uint64_t pos) const {
        return order.x_range(order.at(pos).first.x, order.at(pos).first.x).second - 1;
    }
};

}  // namespace

DynamicGrid::DynamicGrid(uint64_t U, uint64_t W, uint64_t t) : U_(U), W_(W), tree_(U) {
    check_bounds(U, W);
    if (t == 0) throw Error(Errc::invalid_argument, "t must be at least 1");
    uint64_t tau = t * std::max(1u, ceil_log2(W));
    weights_.assign(tree_.depth() + 1, WeightBlocks(tau));
}

void DynamicGrid::insert(const Point& p, UpdateStats* stats) {
    check_point(p, U_, W_);
    u128 top = u128(W_ - 1) * (W_ - 1) * (size() + 1);
    if (top >= (u128(1) << 62)) throw Error(Errc::invalid_argument, "squared weights would overflow");
    uint64_t pos = order_.insert(PointKey{p.x, p.y, seq_++}, p.w);
    auto lv = tree_.insert(pos, p.y);
    for (unsigned d = 0; d < lv.size(); ++d) weights_[d].insert(lv[d], p.w);
    if (stats) stats->touched += lv.size();
}

Point DynamicGrid::erase(uint64_t x, uint64_t y, UpdateStats* stats) {
    auto e = order_.newest(x, y);
    if (!e) throw Error(Errc::not_found, "no point at " + std::to_string(x) + " " + std::to_string(y));
    uint64_t pos = order_.position(e->first);
    auto [sym, lv] = tree_.erase(pos);
    for (unsigned d = 0; d < lv.size(); ++d) weights_[d].erase(lv[d]);
    order_.erase(e->first);
    if (stats) stats->touched += lv.size();
    return {x, y, e->second};
}

void DynamicGrid::update(uint64_t x, uint64_t y, uint64_t w, UpdateStats* stats) {
    if (w >= W_) throw Error(Errc::out_of_range, "weight outside bound");
    erase(x, y, stats);
    insert({x, y, w}, stats);
}

RankRect DynamicGrid::map_rect(const RectQuery& q) const {
    if (q.x0 > q.x1 || q.y0 > q.y1 || q.x0 >= U_ || q.y0 >= U_) return {};
    auto [lo, hi] = order_.x_range(q.x0, std::min(q.x1, U_ - 1));
    if (lo >= hi) return {};
    return {lo, hi - 1, q.y0, std::min(q.y1, U_ - 1)};
}

Point DynamicGrid::point_at(uint64_t pos) const {
    auto [k, w] = order_.at(pos);
    return {k.x, k.y, w};
}

uint64_t DynamicGrid::count(const RectQuery& q) const {
    RankRect r = map_rect(q);
    if (r.empty()) return 0;
    return tree_.count_range(r.x0, r.x1 + 1, r.y0, r.y1);
}

std::vector<Point> DynamicGrid::report(const RectQuery& q) const {
    RankRect r = map_rect(q);
    std::vector<std::pair<PointKey, uint64_t>> hits;
    if (!r.empty())
        tree_.for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
            for (uint64_t i = lo; i < hi; ++i) hits.push_back(order_.at(tree_.to_root(v, i)));
        });
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.y, a.first.x, a.first.seq) > std::tie(b.first.y, b.first.x, b.first.seq);
    });
    std::vector<Point> out;
    for (const auto& [k, w] : hits) out.push_back({k.x, k.y, w});
    return out;
}

std::vector<Point> DynamicGrid::visible(const RankRect& r, Direction dir, GeomStats* stats) const {
    std::vector<Point> out;
    if (r.empty() || size() == 0) return out;
    visible_sweep(tree_, r, dir, DynamicPolicy{order_}, stats,
                  [&](uint64_t pos, uint64_t) { out.push_back(point_at(pos)); });
    return out;
}

std::vector<Point> DynamicGrid::dominance(const RectQuery& q, GeomStats* stats) const {
    return visible(map_rect(q), Direction::SW, stats);
}

std::vector<Point> DynamicGrid::visibility(uint64_t ox, uint64_t oy, Direction dir, GeomStats* stats) const {
    return visible(map_rect(quadrant(ox, oy, dir)), dir, stats);
}

RangeAgg DynamicGrid::totals(const RectQuery& q) const {
    RangeAgg t;
    RankRect r = map_rect(q);
    if (r.empty()) return t;
    tree_.for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        t.add(weights_[v.level].range(v.start + lo, v.start + hi));
    });
    return t;
}

std::optional<Rational> DynamicGrid::avg(const RectQuery& q) const {
    RangeAgg t = totals(q);
    if (t.count == 0) return std::nullopt;
    return Rational::make(t.sum, t.count);
}

std::optional<Rational> DynamicGrid::var(const RectQuery& q) const {
    RangeAgg t = totals(q);
    if (t.count == 0) return std::nullopt;
    u128 c = t.count, s = t.sum;
    return Rational::make(c * t.squares - s * s, c * c);
}

std::optional<WeightedHit> DynamicGrid::extreme(const RectQuery& q, bool maximum) const {
    RankRect r = map_rect(q);
    std::optional<std::pair<uint64_t, PointKey>> best;
    if (r.empty()) return std::nullopt;
    tree_.for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        RangeAgg a = weights_[v.level].range(v.start + lo, v.start + hi);
        uint64_t w = maximum ? a.max : a.min, at = (maximum ? a.max_pos : a.min_pos) - v.start;
        PointKey k = order_.at(tree_.to_root(v, at)).first;
        bool better = !best || (maximum ? w > best->first : w < best->first) || (w == best->first && k < best->second);
        if (better) best = std::pair{w, k};
    });
    if (!best) return std::nullopt;
    return WeightedHit{best->first, Point{best->second.x, best->second.y, best->first}};
}

uint64_t DynamicGrid::bits() const {
    uint64_t b = tree_.bits();
    for (const auto& w : weights_) b += w.bits();
    // order-statistic tree: key, weight and about four words of node overhead
    return b + size() * 8 * 64;
}

void DynamicGrid::audit() const {
    tree_.audit();
    auto pts = order_.all();
    if (tree_.size() != pts.size()) throw Error(Errc::corrupt, "wavelet size differs from point count");
    std::vector<uint64_t> ys(pts.size()), ws(pts.size());
    for (uint64_t i = 0; i < pts.size(); ++i) {
        ys[i] = pts[i].first.y;
        ws[i] = pts[i].second;
        if (tree_.access(i) != ys[i]) throw Error(Errc::corrupt, "root sequence differs from point order");
    }
    for (unsigned d = 0; d <= tree_.depth(); ++d) {
        weights_[d].audit();
        auto order = level_order(ys, tree_.depth(), d);
        auto got = weights_[d].values();
        if (got.size() != order.size()) throw Error(Errc::corrupt, "level weights have the wrong length");
        for (uint64_t p = 0; p < order.size(); ++p)
            if (got[p] != ws[order[p]]) throw Error(Errc::corrupt, "level weights out of place");
    }
}

// ---------------------------------------------------------------- value tree

DynamicValueTree::DynamicValueTree(uint64_t U, uint64_t W, uint64_t ell)
    : U_(U), W_(W), step_(std::max(1u, ceil_log2(ell))), values_(W) {
    check_bounds(U, W);
    if (ell < 2) throw Error(Errc::invalid_argument, "ell must be at least 2");
    grids_.resize(values_.depth() + 1);
    for (unsigned d = 0; d <= values_.depth(); ++d)
        if (has_grid(d)) grids_[d] = DynamicWavelet(U);
}

void DynamicValueTree::insert(const Point& p, UpdateStats* stats) {
    check_point(p, U_, W_);
    uint64_t pos = order_.insert(PointKey{p.x, p.y, seq_++}, p.w);
    auto lv = values_.insert(pos, p.w);
    uint64_t touched = lv.size();
    for (unsigned d = 0; d < lv.size(); ++d)
        if (has_grid(d)) touched += grids_[d].insert(lv[d], p.y).size();
    if (stats) stats->touched += touched;
}

Point DynamicValueTree::erase(uint64_t x, uint64_t y, UpdateStats* stats) {
    auto e = order_.newest(x, y);
    if (!e) throw Error(Errc::not_found, "no point at " + std::to_string(x) + " " + std::to_string(y));
    uint64_t pos = order_.position(e->first);
    auto [w, lv] = values_.erase(pos);
    uint64_t touched = lv.size();
    for (unsigned d = 0; d < lv.size(); ++d)
        if (has_grid(d)) touched += grids_[d].erase(lv[d]).second.size();
    order_.erase(e->first);
    if (stats) stats->touched += touched;
    return {x, y, w};
}

void DynamicValueTree::update(uint64_t x, uint64_t y, uint64_t w, UpdateStats* stats) {
    if (w >= W_) throw Error(Errc::out_of_range, "weight outside bound");
    erase(x, y, stats);
    insert({x, y, w}, stats);
}

DynamicValueTree::Frame DynamicValueTree::root_frame(const RectQuery& q, YRange& ys) const {
    ys = {0, 0, true};
    if (q.x0 > q.x1 || q.y0 > q.y1 || q.x0 >= U_ || q.y0 >= U_) return {values_.root(), 0, 0};
    auto [lo, hi] = order_.x_range(q.x0, std::min(q.x1, U_ - 1));
    ys = {q.y0, std::min(q.y1, U_ - 1), false};
    return {values_.root(), lo, hi};
}

DynamicValueTree::Frame DynamicValueTree::child(const Frame& f, bool b) const {
    return {values_.child(f.v, b), values_.local_rank(f.v, b, f.x0), values_.local_rank(f.v, b, f.x1)};
}

uint64_t DynamicValueTree::count(const Frame& f, const YRange& ys) const {
    if (f.empty() || ys.empty) return 0;
    uint64_t s = f.v.start;
    return grids_[f.v.level].count_range(s + f.x0, s + f.x1, ys.y0, ys.y1);
}

ValueCount DynamicValueTree::descend(const Frame& root, const YRange& ys, uint64_t k) const {
    Frame f = root;
    uint64_t cnt = count(root, ys);
    unsigned depth = values_.depth();
    while (f.v.level < depth) {
        unsigned target = std::min(depth, (f.v.level / step_ + 1) * step_);
        bool found = false;
        auto rec = [&](auto&& self, const Frame& c) -> bool {
            if (c.empty()) return false;
            if (c.v.level == target) {
                uint64_t here = count(c, ys);
                if (here >= k) {
                    f = c;
                    cnt = here;
                    return found = true;
                }
                k -= here;
                return false;
            }
            return self(self, child(c, false)) || self(self, child(c, true));
        };
        rec(rec, f);
        if (!found) throw Error(Errc::corrupt, "quantile descent lost its rank");
    }
    return {f.v.label, cnt};
}

ValueCount DynamicValueTree::quantile(const RectQuery& q, uint64_t k) const {
    YRange ys;
    Frame root = root_frame(q, ys);
    uint64_t c = count(root, ys);
    if (c == 0) throw Error(Errc::empty_range, "quantile of empty rectangle");
    if (k == 0 || k > c) throw Error(Errc::out_of_range, "quantile rank out of range");
    return descend(root, ys, k);
}

uint64_t DynamicValueTree::count_values(const Frame& f, const YRange& ys, uint64_t c0, uint64_t c1) const {
    if (f.empty() || ys.empty) return 0;
    uint64_t lo = values_.sym_lo(f.v), hi = values_.sym_hi(f.v);
    if (hi < c0 || lo > c1) return 0;
    if (c0 <= lo && hi <= c1 && has_grid(f.v.level)) return count(f, ys);
    return count_values(child(f, false), ys, c0, c1) + count_values(child(f, true), ys, c0, c1);
}

uint64_t DynamicValueTree::count_value_range(const RectQuery& q, uint64_t w0, uint64_t w1) const {
    if (w0 > w1 || w0 >= W_) return 0;
    YRange ys;
    Frame root = root_frame(q, ys);
    return count_values(root, ys, w0, std::min(w1, W_ - 1));
}

std::optional<uint64_t> DynamicValueTree::first_present(const Frame& f, const YRange& ys, uint64_t c0, uint64_t c1,
                                                        bool leftmost) const {
    if (f.empty() || ys.empty) return std::nullopt;
    uint64_t lo = values_.sym_lo(f.v), hi = values_.sym_hi(f.v);
    if (hi < c0 || lo > c1) return std::nullopt;
    if (has_grid(f.v.level) && count(f, ys) == 0) return std::nullopt;
    if (values_.is_leaf(f.v)) return f.v.label;
    for (bool b : {!leftmost, leftmost})
        if (auto r = first_present(child(f, b), ys, c0, c1, leftmost)) return r;
    return std::nullopt;
}

std::optional<uint64_t> DynamicValueTree::successor(const RectQuery& q, uint64_t w) const {
    if (w >= W_) return std::nullopt;
    YRange ys;
    Frame root = root_frame(q, ys);
    return first_present(root, ys, w, W_ - 1, true);
}

std::optional<uint64_t> DynamicValueTree::predecessor(const RectQuery& q, uint64_t w) const {
    YRange ys;
    Frame root = root_frame(q, ys);
    return first_present(root, ys, 0, std::min(w, W_ - 1), false);
}

std::vector<ValueCount> DynamicValueTree::majority(const RectQuery& q, Fraction alpha) const {
    std::vector<ValueCount> out;
    YRange ys;
    Frame root = root_frame(q, ys);
    uint64_t c = count(root, ys);
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
    for (uint64_t p : probes) {
        auto r = descend(root, ys, p);
        if (alpha.exceeded_by(r.count, c) &&
            std::none_of(out.begin(), out.end(), [&](const ValueCount& s) { return s.value == r.value; }))
            out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const ValueCount& a, const ValueCount& b) { return a.value < b.value; });
    return out;
}

uint64_t DynamicValueTree::bits() const {
    uint64_t b = values_.bits() + size() * 8 * 64;
    for (const auto& g : grids_) b += g.bits();
    return b;
}

void DynamicValueTree::audit() const {
    values_.audit();
    auto pts = order_.all();
    std::vector<uint64_t> ws(pts.size());
    for (uint64_t i = 0; i < pts.size(); ++i) {
        ws[i] = pts[i].second;
        if (values_.access(i) != ws[i]) throw Error(Errc::corrupt, "value sequence differs from point order");
    }
    for (unsigned d = 0; d <= values_.depth(); ++d) {
        if (!has_grid(d)) continue;
        grids_[d].audit();
        auto order = level_order(ws, values_.depth(), d);
        if (grids_[d].size() != order.size()) throw Error(Errc::corrupt, "value grid has the wrong size");
        for (uint64_t p = 0; p < order.size(); ++p)
            if (grids_[d].access(p) != pts[order[p]].first.y) throw Error(Errc::corrupt, "value grid out of place");
    }
}

}  // namespace wtgrid
