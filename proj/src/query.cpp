#include "wtgrid/query.hpp"

#include <cstdio>
#include <sstream>

#include "wtgrid/geom.hpp"

namespace wtgrid {

namespace {

struct FamilyInfo {
    Family family;
    const char* name;
    bool dynamic;
};

constexpr FamilyInfo kFamilies[] = {
    {Family::count, "count", true},
    {Family::report, "report", true},
    {Family::dominance, "dominance", true},
    {Family::visibility, "visibility", true},
    {Family::sum, "sum", true},
    {Family::avg, "avg", true},
    {Family::var, "var", true},
    {Family::var_stable, "var-stable", false},
    {Family::group_xor, "group-xor", false},
    {Family::group_mod7, "group-mod7", false},
    {Family::min, "min", true},
    {Family::max, "max", true},
    {Family::topk_min, "topk-min", false},
    {Family::topk_max, "topk-max", false},
    {Family::quantile, "quantile", true},
    {Family::count_value_range, "countvr", true},
    {Family::majority_fixed, "majority-fixed", false},
    {Family::majority, "majority", true},
    {Family::succ, "succ", true},
    {Family::pred, "pred", true},
    {Family::topk_frequent, "topk-freq", false},
    {Family::mode, "mode", false},
};

const FamilyInfo& info(Family f) { return kFamilies[static_cast<int>(f)]; }

Error usage(const std::string& what) { return Error(Errc::invalid_argument, what); }

uint64_t parse_u64(const std::string& opt, const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw usage(opt + " expects an unsigned integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::out_of_range&) {
        throw usage(opt + " value too large: " + s);
    }
}

bool needs_rect(Family f) { return f != Family::visibility; }
bool needs_k(Family f) {
    return f == Family::quantile || f == Family::topk_min || f == Family::topk_max || f == Family::topk_frequent;
}
bool needs_w(Family f) { return f == Family::succ || f == Family::pred; }

std::vector<std::string> points(const std::vector<Point>& ps) {
    if (ps.empty()) return {"none"};
    std::vector<std::string> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(format_point(p));
    return out;
}

std::vector<std::string> hits(const std::vector<WeightedHit>& hs) {
    if (hs.empty()) return {"none"};
    std::vector<std::string> out;
    for (const auto& h : hs) out.push_back(format_point(h.point));
    return out;
}

std::vector<std::string> counts(const std::vector<ValueCount>& vs) {
    if (vs.empty()) return {"none"};
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(std::to_string(v.value) + "\t" + std::to_string(v.count));
    return out;
}

std::vector<std::string> rational(const std::optional<Rational>& r) { return {r ? r->str() : "undefined"}; }

std::vector<std::string> hit(const std::optional<WeightedHit>& h) {
    return {h ? format_point(h->point) : "undefined"};
}

std::vector<std::string> value(const std::optional<uint64_t>& v) { return {v ? std::to_string(*v) : "none"}; }

std::vector<std::string> number(uint64_t v) { return {std::to_string(v)}; }

template <typename Fn>
std::vector<std::string> quantile_or_undefined(Fn&& fn) {
    try {
        return number(fn().value);
    } catch (const Error& e) {
        if (e.code() == Errc::empty_range || e.code() == Errc::out_of_range) return {"undefined"};
        throw;
    }
}

Error unsupported(const QuerySpec& q) {
    return usage(std::string(family_name(q.family)) + " is not available on the dynamic index");
}

}  // namespace

const char* family_name(Family f) { return info(f).name; }

Family parse_family(const std::string& s) {
    for (const auto& fi : kFamilies)
        if (s == fi.name) return fi.family;
    throw usage("unknown query family '" + s + "'");
}

const std::vector<Family>& all_families() {
    static const std::vector<Family> all = [] {
        std::vector<Family> v;
        for (const auto& fi : kFamilies) v.push_back(fi.family);
        return v;
    }();
    return all;
}

bool dynamic_supports(Family f) { return info(f).dynamic; }

QuerySpec parse_query(const std::vector<std::string>& tokens, uint64_t U) {
    if (tokens.empty()) throw usage("missing query family");
    QuerySpec q;
    q.family = parse_family(tokens[0]);
    bool rect = false, k = false, w = false, w0 = false, w1 = false, alpha = false, origin = false, dir = false;
    size_t i = 1;
    auto arg = [&](const std::string& opt) -> const std::string& {
        if (i >= tokens.size()) throw usage(opt + " expects a value");
        return tokens[i++];
    };
    while (i < tokens.size()) {
        std::string opt = tokens[i++];
        if (opt == "--rect") {
            if (i < tokens.size() && tokens[i] == "full") {
                ++i;
                q.rect = {0, U - 1, 0, U - 1};
            } else {
                uint64_t x0 = parse_u64(opt, arg(opt)), y0 = parse_u64(opt, arg(opt));
                uint64_t x1 = parse_u64(opt, arg(opt)), y1 = parse_u64(opt, arg(opt));
                q.rect = {x0, x1, y0, y1};
            }
            rect = true;
        } else if (opt == "--k") {
            q.k = parse_u64(opt, arg(opt));
            k = true;
        } else if (opt == "--w") {
            q.w = parse_u64(opt, arg(opt));
            w = true;
        } else if (opt == "--w0") {
            q.w0 = parse_u64(opt, arg(opt));
            w0 = true;
        } else if (opt == "--w1") {
            q.w1 = parse_u64(opt, arg(opt));
            w1 = true;
        } else if (opt == "--alpha") {
            try {
                q.alpha = Fraction::parse(arg(opt));
            } catch (const Error& e) {
                throw usage(std::string("--alpha: ") + e.what());
            }
            if (q.alpha.num == 0 || q.alpha.num >= q.alpha.den) throw usage("--alpha must lie in (0, 1)");
            alpha = true;
        } else if (opt == "--dir") {
            try {
                q.dir = parse_direction(arg(opt));
            } catch (const Error& e) {
                throw usage(std::string("--dir: ") + e.what());
            }
            dir = true;
        } else if (opt == "--origin") {
            q.ox = parse_u64(opt, arg(opt));
            q.oy = parse_u64(opt, arg(opt));
            origin = true;
        } else {
            throw usage("unknown option '" + opt + "'");
        }
    }
    std::string name = family_name(q.family);
    if (needs_rect(q.family) && !rect) throw usage(name + " needs --rect");
    if (needs_k(q.family)) {
        if (!k) throw usage(name + " needs --k");
        if (q.k == 0) throw usage("--k must be at least 1");
    }
    if (needs_w(q.family) && !w) throw usage(name + " needs --w");
    if (q.family == Family::count_value_range && !(w0 && w1)) throw usage("countvr needs --w0 and --w1");
    if (q.family == Family::majority && !alpha) throw usage("majority needs --alpha");
    if (q.family == Family::visibility && !(origin && dir)) throw usage("visibility needs --origin and --dir");
    return q;
}

QuerySpec parse_query_line(const std::string& line, uint64_t U) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    return parse_query(tokens, U);
}

std::string format_query(const QuerySpec& q) {
    std::string s = family_name(q.family);
    bool full = q.rect.x0 == 0 && q.rect.y0 == 0 && q.rect.x1 == UINT64_MAX && q.rect.y1 == UINT64_MAX;
    if (needs_rect(q.family) && full)
        s += " --rect full";
    else if (needs_rect(q.family))
        s += " --rect " + std::to_string(q.rect.x0) + " " + std::to_string(q.rect.y0) + " " + std::to_string(q.rect.x1) +
             " " + std::to_string(q.rect.y1);
    if (needs_k(q.family)) s += " --k " + std::to_string(q.k);
    if (needs_w(q.family)) s += " --w " + std::to_string(q.w);
    if (q.family == Family::count_value_range) s += " --w0 " + std::to_string(q.w0) + " --w1 " + std::to_string(q.w1);
    if (q.family == Family::majority) s += " --alpha " + q.alpha.str();
    if (q.family == Family::visibility)
        s += " --origin " + std::to_string(q.ox) + " " + std::to_string(q.oy) + " --dir " + direction_name(q.dir);
    return s;
}

std::string format_point(const Point& p) {
    return std::to_string(p.x) + "\t" + std::to_string(p.y) + "\t" + std::to_string(p.w);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> answer(const Index& idx, const QuerySpec& q) {
    const RectQuery& r = q.rect;
    switch (q.family) {
        case Family::count: return number(idx.grid().count(r));
        case Family::report: return points(idx.grid().report(r));
        case Family::dominance: return points(dominating_points(idx.grid(), r));
        case Family::visibility: return points(visible_points(idx.grid(), q.ox, q.oy, q.dir));
        case Family::sum: return number(idx.sums().sum(r));
        case Family::avg: return rational(idx.sums().avg(r));
        case Family::var: return rational(idx.sums().var(r));
        case Family::var_stable: {
            auto v = idx.sums().var_stable(r);
            return {v ? format_double(*v) : "undefined"};
        }
        case Family::group_xor: return number(idx.xor_sums().fold(r));
        case Family::group_mod7: return number(idx.mod_sums().fold(r));
        case Family::min: return hit(idx.minmax().min(r));
        case Family::max: return hit(idx.minmax().max(r));
        case Family::topk_min: return hits(idx.minmax().top_k(r, q.k, false));
        case Family::topk_max: return hits(idx.minmax().top_k(r, q.k, true));
        case Family::quantile: return quantile_or_undefined([&] { return idx.values().quantile(r, q.k); });
        case Family::count_value_range: return number(idx.values().count_value_range(r, q.w0, q.w1));
        case Family::majority_fixed:
            if (!idx.fixed_majority()) throw usage("the index was built without a fixed alpha");
            return counts(idx.fixed_majority()->query(r));
        case Family::majority: return counts(idx.values().majority(r, q.alpha));
        case Family::succ: return value(idx.values().successor(r, q.w));
        case Family::pred: return value(idx.values().predecessor(r, q.w));
        case Family::topk_frequent: return counts(idx.values().top_k_frequent(r, q.k));
        case Family::mode: {
            auto m = idx.values().mode(r);
            return m ? counts({*m}) : std::vector<std::string>{"none"};
        }
    }
    throw usage("unhandled query family");
}

std::vector<std::string> answer(const DynamicIndex& idx, const QuerySpec& q) {
    const RectQuery& r = q.rect;
    switch (q.family) {
        case Family::count: return number(idx.grid.count(r));
        case Family::report: return points(idx.grid.report(r));
        case Family::dominance: return points(idx.grid.dominance(r));
        case Family::visibility: return points(idx.grid.visibility(q.ox, q.oy, q.dir));
        case Family::sum: return number(idx.grid.sum(r));
        case Family::avg: return rational(idx.grid.avg(r));
        case Family::var: return rational(idx.grid.var(r));
        case Family::min: return hit(idx.grid.min(r));
        case Family::max: return hit(idx.grid.max(r));
        case Family::quantile: return quantile_or_undefined([&] { return idx.values.quantile(r, q.k); });
        case Family::count_value_range: return number(idx.values.count_value_range(r, q.w0, q.w1));
        case Family::majority: return counts(idx.values.majority(r, q.alpha));
        case Family::succ: return value(idx.values.successor(r, q.w));
        case Family::pred: return value(idx.values.predecessor(r, q.w));
        default: throw unsupported(q);
    }
}

std::vector<std::vector<std::string>> run_batch(const Index& idx, const std::vector<QuerySpec>& specs,
                                                bool parallel) {
    std::vector<std::vector<std::string>> out(specs.size());
    std::vector<std::string> errors(specs.size());
    auto n = static_cast<int64_t>(specs.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (int64_t i = 0; i < n; ++i) {
        try {
            out[i] = answer(idx, specs[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) throw Error(Errc::invalid_argument, "query " + std::to_string(i + 1) + ": " + errors[i]);
    return out;
}

}  // namespace wtgrid
