#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wtgrid/dynamic.hpp"
#include "wtgrid/index.hpp"

namespace wtgrid {

enum class Family {
    count,
    report,
    dominance,
    visibility,
    sum,
    avg,
    var,
    var_stable,
    group_xor,
    group_mod7,
    min,
    max,
    topk_min,
    topk_max,
    quantile,
    count_value_range,
    majority_fixed,
    majority,
    succ,
    pred,
    topk_frequent,
    mode,
};

const char* family_name(Family f);
Family parse_family(const std::string& s);
const std::vector<Family>& all_families();
// Families the dynamic index answers.
bool dynamic_supports(Family f);

struct QuerySpec {
    Family family = Family::count;
    RectQuery rect = RectQuery::full();
    uint64_t k = 0;
    uint64_t w = 0;
    uint64_t w0 = 0, w1 = 0;
    Fraction alpha;
    Direction dir = Direction::NE;
    uint64_t ox = 0, oy = 0;
};

// tokens[0] is the family, the rest are options:
//   --rect x0 y0 x1 y1 | --rect full   (full is [0,U-1] x [0,U-1])
//   --k K  --w W  --w0 A --w1 B  --alpha p/q  --dir NE|NW|SE|SW  --origin X Y
// Missing or malformed options throw Errc::invalid_argument.
QuerySpec parse_query(const std::vector<std::string>& tokens, uint64_t U);
// The same, from one whitespace-separated line.
QuerySpec parse_query_line(const std::string& line, uint64_t U);
std::string format_query(const QuerySpec& q);

// Result lines: counts and values in decimal, points as "x\ty\tw", value
// frequencies as "value\tcount", rationals as "num/den". An empty list is
// "none"; an average, variance, extreme or quantile without data is
// "undefined".
std::vector<std::string> answer(const Index& idx, const QuerySpec& q);
std::vector<std::string> answer(const DynamicIndex& idx, const QuerySpec& q);

// Answers every spec; the parallel path spreads queries over threads and
// returns the same results as the serial one.
std::vector<std::vector<std::string>> run_batch(const Index& idx, const std::vector<QuerySpec>& specs,
                                                bool parallel);

std::string format_point(const Point& p);
std::string format_double(double v);

}  // namespace wtgrid
