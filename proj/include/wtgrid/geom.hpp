#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wtgrid/grid.hpp"
#include "wtgrid/types.hpp"

namespace wtgrid {

struct GeomStats {
    uint64_t visits = 0;
    uint64_t reported = 0;
};

// Depth-first sweep over the leaves of a wavelet tree whose local ranges
// stay non-empty, in ascending or descending symbol order. Bounds may be
// narrowed between leaves; the stack is then re-mapped from the root, so the
// walk resumes where it stopped. Tree needs root/is_leaf/child/local_rank/
// local_select/sym_lo/sym_hi and nodes with a label.
template <typename Tree>
class Sweep {
public:
    using Node = decltype(std::declval<const Tree&>().root());

    struct Hit {
        Node leaf;
        uint64_t lo, hi;
    };

    Sweep(const Tree& t, uint64_t xlo, uint64_t xhi, uint64_t ya, uint64_t yb, bool descending, GeomStats* stats)
        : t_(t), ya_(ya), yb_(yb), descending_(descending), stats_(stats) {
        if (xlo <= xhi && ya <= yb) stack_.push_back({t_.root(), xlo, xhi + 1, 0, false});
    }

    std::optional<Hit> next() {
        while (!stack_.empty()) {
            Frame& f = stack_.back();
            if (f.stage == 0) {
                if (stats_) ++stats_->visits;
                if (f.lo >= f.hi || t_.sym_hi(f.node) < ya_ || t_.sym_lo(f.node) > yb_) {
                    stack_.pop_back();
                    continue;
                }
                if (t_.is_leaf(f.node)) {
                    f.stage = 2;
                    return Hit{f.node, f.lo, f.hi};
                }
                f.stage = 1;
                push_child(descending_);
            } else if (f.stage == 1) {
                f.stage = 2;
                push_child(!descending_);
            } else {
                stack_.pop_back();
            }
        }
        return std::nullopt;
    }

    // Maps a position of the current leaf back to the root.
    uint64_t up(uint64_t pos) const {
        for (size_t k = stack_.size() - 1; k > 0; --k) pos = t_.local_select(stack_[k - 1].node, stack_[k].bit, pos + 1);
        return pos;
    }

    void restrict(uint64_t xlo, uint64_t xhi, uint64_t ya, uint64_t yb) {
        ya_ = ya;
        yb_ = yb;
        if (stack_.empty()) return;
        stack_[0].lo = xlo;
        stack_[0].hi = xlo <= xhi ? xhi + 1 : xlo;
        for (size_t k = 1; k < stack_.size(); ++k) {
            const Frame& p = stack_[k - 1];
            stack_[k].lo = t_.local_rank(p.node, stack_[k].bit, p.lo);
            stack_[k].hi = std::max(stack_[k].lo, t_.local_rank(p.node, stack_[k].bit, p.hi));
        }
    }

private:
    struct Frame {
        Node node;
        uint64_t lo, hi;
        int stage;
        bool bit;
    };

    void push_child(bool b) {
        const Frame& f = stack_.back();
        Node c = t_.child(f.node, b);
        uint64_t lo = t_.local_rank(f.node, b, f.lo), hi = t_.local_rank(f.node, b, f.hi);
        stack_.push_back({c, lo, hi, 0, b});
    }

    const Tree& t_;
    uint64_t ya_, yb_;
    bool descending_;
    GeomStats* stats_;
    std::vector<Frame> stack_;
};

struct SweepPick {
    uint64_t xrank;
    uint64_t yrank;
    // y-ranks sharing the picked point's coordinate
    uint64_t group_lo, group_hi;
};

// Visible points of rank rectangle r from the corner opposite to dir
// (dominance is SW from the top-right corner). Policy supplies
// pick(sweep, hit, dir, xlo, xhi), x_group_first and x_group_last.
template <typename Tree, typename Policy, typename Emit>
void visible_sweep(const Tree& t, const RankRect& r, Direction dir, const Policy& pol, GeomStats* stats, Emit&& emit) {
    if (r.empty()) return;
    bool descending = dir == Direction::SW || dir == Direction::SE;
    uint64_t xlo = r.x0, xhi = r.x1, ya = r.y0, yb = r.y1;
    Sweep<Tree> sw(t, xlo, xhi, ya, yb, descending, stats);
    while (auto h = sw.next()) {
        SweepPick p = pol.pick(sw, *h, dir, xlo, xhi);
        emit(p.xrank, p.yrank);
        if (stats) ++stats->reported;
        switch (dir) {
            case Direction::SW:
                xlo = p.xrank + 1;
                break;
            case Direction::NE:
                if (p.xrank == 0) return;
                xhi = p.xrank - 1;
                break;
            case Direction::NW:
                xlo = pol.x_group_last(p.xrank) + 1;
                ya = p.group_hi + 1;
                break;
            case Direction::SE: {
                uint64_t first = pol.x_group_first(p.xrank);
                if (first == 0 || p.group_lo == 0) return;
                xhi = first - 1;
                yb = p.group_lo - 1;
                break;
            }
        }
        if (xlo > xhi || ya > yb) return;
        sw.restrict(xlo, xhi, ya, yb);
    }
}

std::vector<std::pair<uint64_t, uint64_t>> dominance_ranks(const RankGrid& g, const RankRect& r,
                                                           GeomStats* stats = nullptr);
std::vector<std::pair<uint64_t, uint64_t>> visible_ranks(const RankGrid& g, const RankRect& r, Direction dir,
                                                         GeomStats* stats = nullptr);

// Points of q not dominated by another point of q, by descending y.
std::vector<Point> dominating_points(const RankGrid& g, const RectQuery& q, GeomStats* stats = nullptr);
// Points visible from the origin in quadrant dir. SW and SE come by
// descending y, NE and NW by ascending y.
std::vector<Point> visible_points(const RankGrid& g, uint64_t ox, uint64_t oy, Direction dir,
                                  GeomStats* stats = nullptr);

// Universe quadrant of dir at the origin, closed on all sides.
RectQuery quadrant(uint64_t ox, uint64_t oy, Direction dir);

}  // namespace wtgrid
