#include "wtgrid/oracle.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace wtgrid::oracle {

namespace {

struct Indexed {
    Point p;
    uint64_t idx;
};

std::vector<Indexed> inside(const OracleSet& os, const RectQuery& q) {
    std::vector<Indexed> v;
    for (uint64_t i = 0; i < os.points.size(); ++i)
        if (q.contains(os.points[i])) v.push_back({os.points[i], i});
    return v;
}

bool xorder_less(const Indexed& a, const Indexed& b) {
    return std::tie(a.p.x, a.p.y, a.idx) < std::tie(b.p.x, b.p.y, b.idx);
}

// One point per location: the highest index if keep_last, else the lowest.
std::vector<Indexed> locations(std::vector<Indexed> v, bool keep_last) {
    std::sort(v.begin(), v.end(), xorder_less);
    std::vector<Indexed> out;
    for (const auto& e : v) {
        if (!out.empty() && out.back().p.x == e.p.x && out.back().p.y == e.p.y) {
            if (keep_last) out.back() = e;
        } else {
            out.push_back(e);
        }
    }
    return out;
}

// Distance from the origin along each axis, for points in the quadrant.
struct Offsets {
    uint64_t a, b;
};

std::optional<Offsets> offsets(const Point& p, uint64_t ox, uint64_t oy, Direction dir) {
    bool east = dir == Direction::NE || dir == Direction::SE;
    bool north = dir == Direction::NE || dir == Direction::NW;
    if (east ? p.x < ox : p.x > ox) return std::nullopt;
    if (north ? p.y < oy : p.y > oy) return std::nullopt;
    return Offsets{east ? p.x - ox : ox - p.x, north ? p.y - oy : oy - p.y};
}

std::vector<Point> order_output(std::vector<Point> v, bool ascending_y) {
    std::sort(v.begin(), v.end(), [&](const Point& a, const Point& b) {
        return ascending_y ? std::tie(a.y, a.x) < std::tie(b.y, b.x) : std::tie(a.y, a.x) > std::tie(b.y, b.x);
    });
    return v;
}

// Locations with no other location at offsets (<= a, <= b).
std::vector<Point> minimal(const std::vector<Indexed>& locs, const std::vector<Offsets>& off, bool ascending_y) {
    std::vector<uint64_t> order(locs.size());
    for (uint64_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint64_t i, uint64_t j) {
        return std::tie(off[i].a, off[i].b) < std::tie(off[j].a, off[j].b);
    });
    std::vector<Point> out;
    bool any = false;
    uint64_t best_b = 0;
    for (uint64_t i : order) {
        if (any && off[i].b >= best_b) continue;
        out.push_back(locs[i].p);
        best_b = off[i].b;
        any = true;
    }
    return order_output(std::move(out), ascending_y);
}

}  // namespace

uint64_t count(const OracleSet& os, const RectQuery& q) {
    return std::count_if(os.points.begin(), os.points.end(), [&](const Point& p) { return q.contains(p); });
}

std::vector<Point> report(const OracleSet& os, const RectQuery& q) {
    auto v = inside(os, q);
    std::sort(v.begin(), v.end(), [](const Indexed& a, const Indexed& b) {
        return std::tie(a.p.y, a.p.x, a.idx) > std::tie(b.p.y, b.p.x, b.idx);
    });
    std::vector<Point> out;
    for (auto& e : v) out.push_back(e.p);
    return out;
}

std::vector<Point> dominance(const OracleSet& os, const RectQuery& q) {
    if (q.x0 > q.x1 || q.y0 > q.y1) return {};
    auto locs = locations(inside(os, q), true);
    std::vector<Offsets> off;
    for (auto& e : locs) off.push_back({q.x1 - e.p.x, q.y1 - e.p.y});
    return minimal(locs, off, false);
}

std::vector<Point> visibility(const OracleSet& os, uint64_t ox, uint64_t oy, Direction dir) {
    bool keep_last = dir == Direction::SW || dir == Direction::NW;
    std::vector<Indexed> all;
    for (uint64_t i = 0; i < os.points.size(); ++i)
        if (offsets(os.points[i], ox, oy, dir)) all.push_back({os.points[i], i});
    auto locs = locations(std::move(all), keep_last);
    std::vector<Offsets> off;
    for (auto& e : locs) off.push_back(*offsets(e.p, ox, oy, dir));
    return minimal(locs, off, dir == Direction::NE || dir == Direction::NW);
}

std::vector<Point> dominance_quadratic(const OracleSet& os, const RectQuery& q) {
    auto locs = locations(inside(os, q), true);
    std::vector<Point> out;
    for (auto& p : locs) {
        bool dominated = false;
        for (auto& r : locs)
            if ((r.p.x != p.p.x || r.p.y != p.p.y) && r.p.x >= p.p.x && r.p.y >= p.p.y) dominated = true;
        if (!dominated) out.push_back(p.p);
    }
    return order_output(std::move(out), false);
}

std::vector<Point> visibility_quadratic(const OracleSet& os, uint64_t ox, uint64_t oy, Direction dir) {
    bool keep_last = dir == Direction::SW || dir == Direction::NW;
    std::vector<Indexed> all;
    for (uint64_t i = 0; i < os.points.size(); ++i) all.push_back({os.points[i], i});
    auto locs = locations(std::move(all), keep_last);
    std::vector<Point> out;
    for (auto& p : locs) {
        if (!offsets(p.p, ox, oy, dir)) continue;
        RectQuery span{std::min(ox, p.p.x), std::max(ox, p.p.x), std::min(oy, p.p.y), std::max(oy, p.p.y)};
        bool blocked = false;
        for (auto& r : locs)
            if ((r.p.x != p.p.x || r.p.y != p.p.y) && span.contains(r.p)) blocked = true;
        if (!blocked) out.push_back(p.p);
    }
    return order_output(std::move(out), dir == Direction::NE || dir == Direction::NW);
}

uint64_t sum(const OracleSet& os, const RectQuery& q) {
    uint64_t s = 0;
    for (const auto& p : os.points)
        if (q.contains(p)) s += p.w;
    return s;
}

std::optional<Rational> avg(const OracleSet& os, const RectQuery& q) {
    uint64_t c = count(os, q);
    if (c == 0) return std::nullopt;
    return Rational::make(sum(os, q), c);
}

std::optional<Rational> var(const OracleSet& os, const RectQuery& q) {
    u128 c = 0, s = 0, s2 = 0;
    for (const auto& p : os.points)
        if (q.contains(p)) {
            ++c;
            s += p.w;
            s2 += u128(p.w) * p.w;
        }
    if (c == 0) return std::nullopt;
    return Rational::make(c * s2 - s * s, c * c);
}

std::optional<long double> var_two_pass(const OracleSet& os, const RectQuery& q) {
    long double c = 0, s = 0;
    for (const auto& p : os.points)
        if (q.contains(p)) {
            ++c;
            s += p.w;
        }
    if (c == 0) return std::nullopt;
    long double mean = s / c, acc = 0;
    for (const auto& p : os.points)
        if (q.contains(p)) acc += (p.w - mean) * (p.w - mean);
    return acc / c;
}

namespace {

std::vector<Indexed> by_value(const OracleSet& os, const RectQuery& q, bool largest) {
    auto v = inside(os, q);
    std::sort(v.begin(), v.end(), [&](const Indexed& a, const Indexed& b) {
        if (a.p.w != b.p.w) return largest ? a.p.w > b.p.w : a.p.w < b.p.w;
        return xorder_less(a, b);
    });
    return v;
}

std::vector<WeightedHit> first_k(const std::vector<Indexed>& v, uint64_t k) {
    std::vector<WeightedHit> out;
    for (uint64_t i = 0; i < v.size() && i < k; ++i) out.push_back({v[i].p.w, v[i].p});
    return out;
}

}  // namespace

std::optional<WeightedHit> min(const OracleSet& os, const RectQuery& q) {
    auto v = first_k(by_value(os, q, false), 1);
    if (v.empty()) return std::nullopt;
    return v[0];
}

std::optional<WeightedHit> max(const OracleSet& os, const RectQuery& q) {
    auto v = first_k(by_value(os, q, true), 1);
    if (v.empty()) return std::nullopt;
    return v[0];
}

std::vector<WeightedHit> top_k_smallest(const OracleSet& os, const RectQuery& q, uint64_t k) {
    return first_k(by_value(os, q, false), k);
}

std::vector<WeightedHit> top_k_largest(const OracleSet& os, const RectQuery& q, uint64_t k) {
    return first_k(by_value(os, q, true), k);
}

std::vector<WeightedHit> top_k_smallest_selection(const OracleSet& os, const RectQuery& q, uint64_t k) {
    auto v = inside(os, q);
    std::vector<bool> taken(v.size(), false);
    std::vector<WeightedHit> out;
    while (out.size() < k && out.size() < v.size()) {
        uint64_t best = v.size();
        for (uint64_t i = 0; i < v.size(); ++i) {
            if (taken[i]) continue;
            if (best == v.size() || v[i].p.w < v[best].p.w || (v[i].p.w == v[best].p.w && xorder_less(v[i], v[best])))
                best = i;
        }
        taken[best] = true;
        out.push_back({v[best].p.w, v[best].p});
    }
    return out;
}

uint64_t quantile(const OracleSet& os, const RectQuery& q, uint64_t k) {
    std::vector<uint64_t> w;
    for (const auto& p : os.points)
        if (q.contains(p)) w.push_back(p.w);
    if (w.empty()) throw Error(Errc::empty_range, "quantile of empty rectangle");
    if (k == 0 || k > w.size()) throw Error(Errc::out_of_range, "quantile rank out of range");
    std::sort(w.begin(), w.end());
    return w[k - 1];
}

uint64_t quantile_counting(const OracleSet& os, const RectQuery& q, uint64_t k) {
    std::map<uint64_t, uint64_t> freq;
    uint64_t c = 0;
    for (const auto& p : os.points)
        if (q.contains(p)) {
            ++freq[p.w];
            ++c;
        }
    if (c == 0) throw Error(Errc::empty_range, "quantile of empty rectangle");
    if (k == 0 || k > c) throw Error(Errc::out_of_range, "quantile rank out of range");
    for (auto [w, f] : freq) {
        if (k <= f) return w;
        k -= f;
    }
    throw Error(Errc::out_of_range, "quantile rank out of range");
}

uint64_t count_value(const OracleSet& os, const RectQuery& q, uint64_t value) {
    return count_value_range(os, q, value, value);
}

uint64_t count_value_range(const OracleSet& os, const RectQuery& q, uint64_t w0, uint64_t w1) {
    uint64_t c = 0;
    for (const auto& p : os.points)
        if (q.contains(p) && w0 <= p.w && p.w <= w1) ++c;
    return c;
}

std::vector<ValueCount> majority(const OracleSet& os, const RectQuery& q, Fraction alpha) {
    std::map<uint64_t, uint64_t> freq;
    uint64_t c = 0;
    for (const auto& p : os.points)
        if (q.contains(p)) {
            ++freq[p.w];
            ++c;
        }
    std::vector<ValueCount> out;
    for (auto [w, f] : freq)
        if (alpha.exceeded_by(f, c)) out.push_back({w, f});
    return out;
}

std::vector<ValueCount> majority_sorted(const OracleSet& os, const RectQuery& q, Fraction alpha) {
    std::vector<uint64_t> w;
    for (const auto& p : os.points)
        if (q.contains(p)) w.push_back(p.w);
    std::sort(w.begin(), w.end());
    std::vector<ValueCount> out;
    for (uint64_t i = 0; i < w.size();) {
        uint64_t j = i;
        while (j < w.size() && w[j] == w[i]) ++j;
        if (alpha.exceeded_by(j - i, w.size())) out.push_back({w[i], j - i});
        i = j;
    }
    return out;
}

std::optional<uint64_t> successor(const OracleSet& os, const RectQuery& q, uint64_t w) {
    std::optional<uint64_t> best;
    for (const auto& p : os.points)
        if (q.contains(p) && p.w >= w && (!best || p.w < *best)) best = p.w;
    return best;
}

std::optional<uint64_t> predecessor(const OracleSet& os, const RectQuery& q, uint64_t w) {
    std::optional<uint64_t> best;
    for (const auto& p : os.points)
        if (q.contains(p) && p.w <= w && (!best || p.w > *best)) best = p.w;
    return best;
}

std::vector<ValueCount> top_k_frequent(const OracleSet& os, const RectQuery& q, uint64_t k) {
    std::map<uint64_t, uint64_t> freq;
    for (const auto& p : os.points)
        if (q.contains(p)) ++freq[p.w];
    std::vector<ValueCount> v;
    for (auto [w, f] : freq) v.push_back({w, f});
    std::stable_sort(v.begin(), v.end(), [](const ValueCount& a, const ValueCount& b) { return a.count > b.count; });
    if (v.size() > k) v.resize(k);
    return v;
}

std::optional<ValueCount> mode(const OracleSet& os, const RectQuery& q) {
    auto v = top_k_frequent(os, q, 1);
    if (v.empty()) return std::nullopt;
    return v[0];
}

void DynamicOracle::erase(uint64_t x, uint64_t y) {
    auto& pts = set_.points;
    for (uint64_t i = pts.size(); i-- > 0;)
        if (pts[i].x == x && pts[i].y == y) {
            pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
            return;
        }
    throw Error(Errc::not_found, "no point at (" + std::to_string(x) + "," + std::to_string(y) + ")");
}

void DynamicOracle::update(uint64_t x, uint64_t y, uint64_t w) {
    erase(x, y);
    insert({x, y, w});
}

}  // namespace wtgrid::oracle
