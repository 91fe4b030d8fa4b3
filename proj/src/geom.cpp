#include "wtgrid/geom.hpp"

namespace wtgrid {

namespace {

// Static grids hold one point per leaf; equal y are split over adjacent
// leaves, so NW and SE move to the group's extreme member by counting.
struct StaticPolicy {
    const RankGrid& g;

    SweepPick pick(const Sweep<WaveletTree>& sw, const Sweep<WaveletTree>::Hit& h, Direction dir, uint64_t xlo,
                   uint64_t xhi) const {
        uint64_t yr = h.leaf.label;
        if (dir == Direction::NW) {
            uint64_t g1 = g.y_group_last(yr);
            uint64_t c = g.tree().count_range(xlo, xhi + 1, yr, g1);
            if (c > 1) return {g.xrank(yr + c - 1), yr + c - 1, yr, g1};
            return {sw.up(h.lo), yr, yr, g1};
        }
        if (dir == Direction::SE) {
            uint64_t g0 = g.y_group_first(yr);
            uint64_t c = g.tree().count_range(xlo, xhi + 1, g0, yr);
            if (c > 1) return {g.xrank(yr - c + 1), yr - c + 1, g0, yr};
            return {sw.up(h.lo), yr, g0, yr};
        }
        return {sw.up(h.lo), yr, yr, yr};
    }
    uint64_t x_group_first(uint64_t xr) const { return g.x_group_first(xr); }
    uint64_t x_group_last(uint64_t xr) const { return g.x_group_last(xr); }
};

std::vector<Point> to_points(const RankGrid& g, const std::vector<std::pair<uint64_t, uint64_t>>& v) {
    std::vector<Point> out;
    out.reserve(v.size());
    for (auto [xr, yr] : v) out.push_back({g.xmap().at(xr), g.ymap().at(yr), g.weight(xr)});
    return out;
}

}  // namespace

RectQuery quadrant(uint64_t ox, uint64_t oy, Direction dir) {
    switch (dir) {
        case Direction::NE: return {ox, UINT64_MAX, oy, UINT64_MAX};
        case Direction::NW: return {0, ox, oy, UINT64_MAX};
        case Direction::SE: return {ox, UINT64_MAX, 0, oy};
        case Direction::SW: return {0, ox, 0, oy};
    }
    return {};
}

std::vector<std::pair<uint64_t, uint64_t>> visible_ranks(const RankGrid& g, const RankRect& r, Direction dir,
                                                         GeomStats* stats) {
    std::vector<std::pair<uint64_t, uint64_t>> out;
    if (g.size() == 0) return out;
    visible_sweep(g.tree(), r, dir, StaticPolicy{g}, stats, [&](uint64_t xr, uint64_t yr) { out.emplace_back(xr, yr); });
    return out;
}

std::vector<std::pair<uint64_t, uint64_t>> dominance_ranks(const RankGrid& g, const RankRect& r, GeomStats* stats) {
    return visible_ranks(g, r, Direction::SW, stats);
}

std::vector<Point> dominating_points(const RankGrid& g, const RectQuery& q, GeomStats* stats) {
    return to_points(g, dominance_ranks(g, g.map_rect(q), stats));
}

std::vector<Point> visible_points(const RankGrid& g, uint64_t ox, uint64_t oy, Direction dir, GeomStats* stats) {
    return to_points(g, visible_ranks(g, g.map_rect(quadrant(ox, oy, dir)), dir, stats));
}

}  // namespace wtgrid
