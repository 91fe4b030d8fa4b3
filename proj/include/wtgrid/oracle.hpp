#pragma once

#include <optional>
#include <vector>

#include "wtgrid/group.hpp"
#include "wtgrid/types.hpp"

// Exhaustive reference answers over a plain point list. Index i of the list
// is the point's identity: among coincident points the rank-space order
// follows i, so tie rules below mention it explicitly.
namespace wtgrid::oracle {

struct OracleSet {
    std::vector<Point> points;
};

uint64_t count(const OracleSet& os, const RectQuery& q);
// Descending y, then descending x, then descending index.
std::vector<Point> report(const OracleSet& os, const RectQuery& q);

// Distinct locations of Q not dominated by another location of Q, by
// descending y. Coincident points are represented by the highest index.
std::vector<Point> dominance(const OracleSet& os, const RectQuery& q);
// Locations whose closed rectangle with the origin holds no other location.
// SW and SE come by descending y, NE and NW by ascending y. Coincident
// points: highest index for SW/NW, lowest for NE/SE.
std::vector<Point> visibility(const OracleSet& os, uint64_t ox, uint64_t oy, Direction dir);
// Same contracts, by pairwise checks.
std::vector<Point> dominance_quadratic(const OracleSet& os, const RectQuery& q);
std::vector<Point> visibility_quadratic(const OracleSet& os, uint64_t ox, uint64_t oy, Direction dir);

uint64_t sum(const OracleSet& os, const RectQuery& q);
std::optional<Rational> avg(const OracleSet& os, const RectQuery& q);
std::optional<Rational> var(const OracleSet& os, const RectQuery& q);
// Two-pass variance in long double.
std::optional<long double> var_two_pass(const OracleSet& os, const RectQuery& q);

template <typename Group>
uint64_t group_fold(const OracleSet& os, const RectQuery& q, const Group& g) {
    uint64_t acc = g.identity();
    for (const auto& p : os.points)
        if (q.contains(p)) acc = g.op(acc, g.lift(p.w));
    return acc;
}

// Minimum (maximum) weight; the witness is the first such point in
// (x, y, index) order.
std::optional<WeightedHit> min(const OracleSet& os, const RectQuery& q);
std::optional<WeightedHit> max(const OracleSet& os, const RectQuery& q);
// Ascending (descending) value, ties by (x, y, index).
std::vector<WeightedHit> top_k_smallest(const OracleSet& os, const RectQuery& q, uint64_t k);
std::vector<WeightedHit> top_k_largest(const OracleSet& os, const RectQuery& q, uint64_t k);
// Repeated minimum extraction; same contract as top_k_smallest.
std::vector<WeightedHit> top_k_smallest_selection(const OracleSet& os, const RectQuery& q, uint64_t k);

// k-th smallest weight (1-based, duplicates counted).
uint64_t quantile(const OracleSet& os, const RectQuery& q, uint64_t k);
uint64_t quantile_counting(const OracleSet& os, const RectQuery& q, uint64_t k);

uint64_t count_value(const OracleSet& os, const RectQuery& q, uint64_t value);
uint64_t count_value_range(const OracleSet& os, const RectQuery& q, uint64_t w0, uint64_t w1);

// Values with count > alpha * count(Q), ascending by value.
std::vector<ValueCount> majority(const OracleSet& os, const RectQuery& q, Fraction alpha);
std::vector<ValueCount> majority_sorted(const OracleSet& os, const RectQuery& q, Fraction alpha);

std::optional<uint64_t> successor(const OracleSet& os, const RectQuery& q, uint64_t w);
std::optional<uint64_t> predecessor(const OracleSet& os, const RectQuery& q, uint64_t w);

// Descending count, ties by ascending value.
std::vector<ValueCount> top_k_frequent(const OracleSet& os, const RectQuery& q, uint64_t k);
std::optional<ValueCount> mode(const OracleSet& os, const RectQuery& q);

// Multiset replayed from an operation script. Deleting or updating (x, y)
// acts on the most recently inserted point there; an updated point counts
// as newly inserted.
class DynamicOracle {
public:
    void insert(const Point& p) { set_.points.push_back(p); }
    void erase(uint64_t x, uint64_t y);
    void update(uint64_t x, uint64_t y, uint64_t w);
    const OracleSet& set() const { return set_; }

private:
    OracleSet set_;
};

}  // namespace wtgrid::oracle
