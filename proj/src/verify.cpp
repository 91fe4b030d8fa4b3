#include "wtgrid/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "wtgrid/workload.hpp"

namespace wtgrid {

namespace {

constexpr Fraction kAlphas[] = {{1, 2}, {1, 3}, {1, 4}, {1, 8}, {3, 5}, {17, 50}, {11, 100}};
// predicate evaluations allowed while minimizing
constexpr int kMinimizeBudget = 4000;

std::vector<std::string> points(const std::vector<Point>& ps) {
    if (ps.empty()) return {"none"};
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(format_point(p));
    return out;
}

std::vector<std::string> hits(const std::vector<WeightedHit>& hs) {
    std::vector<Point> ps;
    for (const auto& h : hs) ps.push_back(h.point);
    return points(ps);
}

std::vector<std::string> counts(const std::vector<ValueCount>& vs) {
    if (vs.empty()) return {"none"};
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(std::to_string(v.value) + "\t" + std::to_string(v.count));
    return out;
}

std::vector<std::string> number(uint64_t v) { return {std::to_string(v)}; }

std::vector<std::string> guarded(const std::function<std::vector<std::string>()>& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {std::string("error: ") + e.what()};
    }
}

std::string joined(const std::vector<std::string>& lines) {
    std::string s;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) s += '|';
        for (char c : lines[i]) s += c == '\t' ? ' ' : c;
    }
    return s;
}

// Delta debugging by complement removal: drops chunks while the failure
// persists, refining the chunk size when no chunk can go.
template <typename T, typename Fails>
std::vector<T> minimize(std::vector<T> items, Fails&& fails) {
    int budget = kMinimizeBudget;
    size_t parts = 2;
    while (items.size() >= 2 && budget > 0) {
        size_t chunk = (items.size() + parts - 1) / parts;
        bool reduced = false;
        for (size_t start = 0; start < items.size() && budget > 0; start += chunk) {
            std::vector<T> rest(items.begin(), items.begin() + start);
            rest.insert(rest.end(), items.begin() + std::min(items.size(), start + chunk), items.end());
            --budget;
            if (fails(rest)) {
                items = std::move(rest);
                parts = std::max<size_t>(parts - 1, 2);
                reduced = true;
                break;
            }
        }
        if (!reduced) {
            if (parts >= items.size()) break;
            parts = std::min(items.size(), parts * 2);
        }
    }
    if (items.size() == 1 && budget > 0 && fails(std::vector<T>{})) items.clear();
    return items;
}

std::string params_text(const BuildParams& p) {
    return "t=" + std::to_string(p.t) + " ell=" + std::to_string(p.ell) +
           " alpha=" + (p.alpha ? p.alpha->str() : std::string("none"));
}

std::string points_text(const std::vector<Point>& ps) {
    std::string s;
    for (const auto& p : ps) {
        if (!s.empty()) s += ';';
        s += std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.w);
    }
    return s;
}

std::string ops_text(const std::vector<ScriptOp>& ops) {
    std::string s;
    for (const auto& op : ops) {
        if (!s.empty()) s += ';';
        s += op.kind;
        s += " " + std::to_string(op.p.x) + " " + std::to_string(op.p.y);
        if (op.kind != 'd') s += " " + std::to_string(op.p.w);
    }
    return s;
}

bool static_fails(const WeightedPointSet& ps, const BuildParams& params, const QuerySpec& q, bool fault) {
    auto expected = oracle_answer({ps.points}, q, params.alpha);
    auto got = guarded([&] {
        Index idx(ps, params);
        if (fault) apply_fault(idx);
        return answer(idx, q);
    });
    return !same_answer(q, got, expected);
}

// Replays ops and answers q afterwards; true when index and oracle disagree.
bool script_fails(const std::vector<ScriptOp>& ops, uint64_t U, uint64_t W, const BuildParams& params,
                  const QuerySpec& q) {
    DynamicIndex idx(U, W, params.t, params.ell);
    oracle::DynamicOracle ref;
    auto got = guarded([&] {
        for (const auto& op : ops) apply_op(idx, ref, op);
        return answer(idx, q);
    });
    return !same_answer(q, got, oracle_answer(ref.set(), q, std::nullopt));
}

}  // namespace

void apply_fault(Index& idx) {
    if (idx.size() > 0) idx.inject_fault(0, idx.size() / 2);
}

std::vector<std::string> oracle_answer(const oracle::OracleSet& os, const QuerySpec& q,
                                       std::optional<Fraction> fixed_alpha) {
    const RectQuery& r = q.rect;
    auto rational = [](const std::optional<Rational>& v) { return std::vector<std::string>{v ? v->str() : "undefined"}; };
    auto hit = [](const std::optional<WeightedHit>& h) {
        return std::vector<std::string>{h ? format_point(h->point) : "undefined"};
    };
    auto value = [](const std::optional<uint64_t>& v) { return std::vector<std::string>{v ? std::to_string(*v) : "none"}; };
    switch (q.family) {
        case Family::count: return number(oracle::count(os, r));
        case Family::report: return points(oracle::report(os, r));
        case Family::dominance: return points(oracle::dominance(os, r));
        case Family::visibility: return points(oracle::visibility(os, q.ox, q.oy, q.dir));
        case Family::sum: return number(oracle::sum(os, r));
        case Family::avg: return rational(oracle::avg(os, r));
        case Family::var: return rational(oracle::var(os, r));
        case Family::var_stable: {
            auto v = oracle::var_two_pass(os, r);
            return {v ? format_double(double(*v)) : "undefined"};
        }
        case Family::group_xor: return number(oracle::group_fold(os, r, XorGroup{}));
        case Family::group_mod7: return number(oracle::group_fold(os, r, ModularGroup{7}));
        case Family::min: return hit(oracle::min(os, r));
        case Family::max: return hit(oracle::max(os, r));
        case Family::topk_min: return hits(oracle::top_k_smallest(os, r, q.k));
        case Family::topk_max: return hits(oracle::top_k_largest(os, r, q.k));
        case Family::quantile:
            if (q.k == 0 || q.k > oracle::count(os, r)) return {"undefined"};
            return number(oracle::quantile(os, r, q.k));
        case Family::count_value_range: return number(oracle::count_value_range(os, r, q.w0, q.w1));
        case Family::majority_fixed:
            if (!fixed_alpha) return {"error: no fixed alpha"};
            return counts(oracle::majority(os, r, *fixed_alpha));
        case Family::majority: return counts(oracle::majority(os, r, q.alpha));
        case Family::succ: return value(oracle::successor(os, r, q.w));
        case Family::pred: return value(oracle::predecessor(os, r, q.w));
        case Family::topk_frequent: return counts(oracle::top_k_frequent(os, r, q.k));
        case Family::mode: {
            auto m = oracle::mode(os, r);
            return m ? counts({*m}) : std::vector<std::string>{"none"};
        }
    }
    return {"error: unknown family"};
}

bool same_answer(const QuerySpec& q, const std::vector<std::string>& got, const std::vector<std::string>& expected) {
    if (q.family != Family::var_stable || got.size() != 1 || expected.size() != 1 || expected[0] == "undefined" ||
        got[0] == "undefined")
        return got == expected;
    try {
        double a = std::stod(got[0]), b = std::stod(expected[0]);
        return std::fabs(a - b) <= kStableVarRel * std::max(1.0, std::fabs(b));
    } catch (const std::exception&) {
        return false;
    }
}

BuildParams random_params(std::mt19937_64& rng) {
    BuildParams p;
    p.t = uint64_t(1) << (rng() % 4);
    const uint64_t ells[] = {2, 4, 16};
    p.ell = ells[rng() % 3];
    p.alpha = Fraction{1, uint64_t(2) << (rng() % 3)};
    return p;
}

QuerySpec random_query(std::mt19937_64& rng, Family f, const RectQuery& r, const WeightedPointSet& ps) {
    QuerySpec q;
    q.family = f;
    q.rect = r;
    uint64_t c = 0;
    for (const auto& p : ps.points) c += r.contains(p);
    switch (rng() % 4) {
        case 0: q.k = 1; break;
        case 1: q.k = std::max<uint64_t>(c, 1); break;
        case 2: q.k = c + 1; break;
        default: q.k = 1 + rng() % (c + 1);
    }
    auto some_weight = [&]() -> uint64_t {
        if (!ps.points.empty() && rng() % 2) {
            uint64_t w = ps.points[rng() % ps.points.size()].w, d = rng() % 3;
            return d == 0 && w > 0 ? w - 1 : w + (d == 2);
        }
        return rng() % (ps.W + 1);
    };
    q.w = some_weight();
    uint64_t a = some_weight(), b = some_weight();
    q.w0 = std::min(a, b);
    q.w1 = std::max(a, b);
    q.alpha = kAlphas[rng() % std::size(kAlphas)];
    q.dir = Direction(rng() % 4);
    if (!ps.points.empty() && rng() % 2) {
        const Point& p = ps.points[rng() % ps.points.size()];
        q.ox = p.x;
        q.oy = p.y;
    } else {
        q.ox = rng() % ps.U;
        q.oy = rng() % ps.U;
    }
    return q;
}

std::vector<ScriptOp> random_script(std::mt19937_64& rng, uint64_t length, uint64_t U, uint64_t W) {
    std::vector<ScriptOp> ops;
    std::vector<Point> live;
    // a small coordinate pool now and then to force coincident points
    uint64_t pool = rng() % 3 == 0 ? 1 + rng() % 6 : U;
    auto coord = [&] { return pool == U ? rng() % U : (rng() % pool) * (U / pool); };
    for (uint64_t i = 0; i < length; ++i) {
        uint64_t roll = rng() % 8;
        ScriptOp op;
        if (live.empty() || roll < 4) {
            op = {'i', {coord(), coord(), rng() % W}};
            live.push_back(op.p);
        } else if (roll < 6) {
            size_t j = rng() % live.size();
            op = {'d', {live[j].x, live[j].y, 0}};
            live.erase(live.begin() + j);
        } else if (roll < 7) {
            size_t j = rng() % live.size();
            op = {'u', {live[j].x, live[j].y, rng() % W}};
            live[j].w = op.p.w;
        } else {
            // location that may hold nothing
            op = {rng() % 2 ? 'd' : 'u', {coord(), coord(), rng() % W}};
        }
        ops.push_back(op);
    }
    return ops;
}

bool apply_op(DynamicIndex& idx, oracle::DynamicOracle& ref, const ScriptOp& op) {
    if (op.kind == 'i') {
        idx.insert(op.p);
        ref.insert(op.p);
        return true;
    }
    bool present = std::any_of(ref.set().points.begin(), ref.set().points.end(),
                               [&](const Point& p) { return p.x == op.p.x && p.y == op.p.y; });
    if (!present) return false;
    if (op.kind == 'd') {
        idx.erase(op.p.x, op.p.y);
        ref.erase(op.p.x, op.p.y);
    } else {
        idx.update(op.p.x, op.p.y, op.p.w);
        ref.update(op.p.x, op.p.y, op.p.w);
    }
    return true;
}

std::optional<Mismatch> check_static(const WeightedPointSet& ps, const BuildParams& params,
                                     const std::vector<RectQuery>& rects, std::mt19937_64& rng, bool all_k,
                                     bool inject_fault, uint64_t* checks) {
    Index idx(ps, params);
    if (inject_fault) apply_fault(idx);
    oracle::OracleSet os{ps.points};
    auto check = [&](const QuerySpec& q) -> std::optional<Mismatch> {
        if (checks) ++*checks;
        auto got = guarded([&] { return answer(idx, q); });
        auto expected = oracle_answer(os, q, params.alpha);
        if (same_answer(q, got, expected)) return std::nullopt;
        return Mismatch{"static", 0, q, expected, got, ""};
    };
    for (const auto& r : rects) {
        for (Family f : all_families()) {
            if (f == Family::majority_fixed && !params.alpha) continue;
            QuerySpec q = random_query(rng, f, r, ps);
            if (f == Family::quantile && all_k) {
                // every k against one sorted copy; a miss is re-checked through the full path
                std::vector<uint64_t> sorted;
                for (const auto& p : ps.points)
                    if (r.contains(p)) sorted.push_back(p.w);
                std::sort(sorted.begin(), sorted.end());
                for (uint64_t k = 1; k <= sorted.size() + 1; ++k) {
                    if (checks) ++*checks;
                    q.k = k;
                    auto got = guarded([&] { return answer(idx, q); });
                    std::string want = k <= sorted.size() ? std::to_string(sorted[k - 1]) : "undefined";
                    if (got != std::vector<std::string>{want}) return Mismatch{"static", 0, q, {want}, got, ""};
                }
                continue;
            }
            if (auto m = check(q)) return m;
        }
    }
    return std::nullopt;
}

std::optional<Mismatch> check_script(const std::vector<ScriptOp>& ops, uint64_t U, uint64_t W, const BuildParams& params,
                                     std::mt19937_64& rng, uint64_t* checks) {
    DynamicIndex idx(U, W, params.t, params.ell);
    oracle::DynamicOracle ref;
    for (size_t step = 0; step < ops.size(); ++step) {
        try {
            apply_op(idx, ref, ops[step]);
        } catch (const std::exception& e) {
            QuerySpec q;
            return Mismatch{"dynamic", step, q, {"ok"}, {std::string("error: ") + e.what()}, ""};
        }
        WeightedPointSet view{ref.set().points, U, W};
        RectQuery r = workload::anchored_rect(rng, view, int(rng() % workload::kRectKinds));
        for (Family f : all_families()) {
            if (!dynamic_supports(f)) continue;
            QuerySpec q = random_query(rng, f, r, view);
            if (checks) ++*checks;
            auto got = guarded([&] { return answer(idx, q); });
            auto expected = oracle_answer(ref.set(), q, std::nullopt);
            if (!same_answer(q, got, expected)) return Mismatch{"dynamic", step, q, expected, got, ""};
        }
    }
    return std::nullopt;
}

VerifyReport run_verify(const VerifyConfig& cfg) {
    if (cfg.U == 0 || cfg.W == 0) throw Error(Errc::invalid_argument, "U and W must be positive");
    VerifyReport rep;
    for (uint64_t i = 0; i < cfg.iterations; ++i) {
        std::mt19937_64 rng(workload::mix_seed(cfg.seed, i));
        uint64_t n = cfg.random_n ? workload::log_uniform(rng, 1, std::max<uint64_t>(cfg.n, 1)) : cfg.n;
        WeightedPointSet ps = workload::random_set(rng, n, cfg.U, cfg.W);
        BuildParams params = random_params(rng);
        std::vector<RectQuery> rects;
        for (uint64_t k = 0; k < cfg.rects; ++k) rects.push_back(workload::anchored_rect(rng, ps, int(k % workload::kRectKinds)));
        ++rep.instances;
        auto m = check_static(ps, params, rects, rng, cfg.all_k, cfg.inject_fault, &rep.checks);
        if (!m) continue;
        m->instance = i;
        auto small = minimize(ps.points, [&](const std::vector<Point>& pts) {
            return static_fails({pts, ps.U, ps.W}, params, m->query, cfg.inject_fault);
        });
        WeightedPointSet reduced{small, ps.U, ps.W};
        if (static_fails(reduced, params, m->query, cfg.inject_fault)) {
            m->expected = oracle_answer({small}, m->query, params.alpha);
            m->got = guarded([&] {
                Index idx(reduced, params);
                if (cfg.inject_fault) apply_fault(idx);
                return answer(idx, m->query);
            });
        } else {
            small = ps.points;
        }
        m->repro = "repro: static seed=" + std::to_string(cfg.seed) + " instance=" + std::to_string(i) + " " +
                   params_text(params) + " U=" + std::to_string(ps.U) + " W=" + std::to_string(ps.W) +
                   " fault=" + (cfg.inject_fault ? "1" : "0") + " query=\"" + format_query(m->query) + "\" points=\"" +
                   points_text(small) + "\" expected=\"" + joined(m->expected) + "\" got=\"" + joined(m->got) + "\"";
        rep.mismatch = std::move(m);
        return rep;
    }
    for (uint64_t s = 0; s < cfg.scripts; ++s) {
        std::mt19937_64 rng(workload::mix_seed(cfg.seed ^ 0x5eed5c0de5ULL, s));
        uint64_t len = workload::log_uniform(rng, 1, std::max<uint64_t>(cfg.script_length, 1));
        auto ops = random_script(rng, len, cfg.U, cfg.W);
        BuildParams params = random_params(rng);
        ++rep.scripts;
        auto m = check_script(ops, cfg.U, cfg.W, params, rng, &rep.checks);
        if (!m) {
            rep.operations += ops.size();
            continue;
        }
        rep.operations += m->instance + 1;
        std::vector<ScriptOp> prefix(ops.begin(), ops.begin() + m->instance + 1);
        uint64_t step = m->instance;
        m->instance = s;
        auto small = minimize(prefix, [&](const std::vector<ScriptOp>& o) {
            return script_fails(o, cfg.U, cfg.W, params, m->query);
        });
        if (!script_fails(small, cfg.U, cfg.W, params, m->query)) small = prefix;
        m->repro = "repro: dynamic seed=" + std::to_string(cfg.seed) + " script=" + std::to_string(s) +
                   " step=" + std::to_string(step) + " " + params_text(params) + " U=" + std::to_string(cfg.U) +
                   " W=" + std::to_string(cfg.W) + " query=\"" + format_query(m->query) + "\" ops=\"" +
                   ops_text(small) + "\" expected=\"" + joined(m->expected) + "\" got=\"" + joined(m->got) + "\"";
        rep.mismatch = std::move(m);
        return rep;
    }
    return rep;
}

std::string VerifyReport::text() const {
    std::ostringstream out;
    out << "static instances: " << instances << "\n";
    out << "dynamic scripts: " << scripts << " (" << operations << " operations)\n";
    out << "checks: " << checks << "\n";
    if (!mismatch) {
        out << "result: PASS\n";
        return out.str();
    }
    const Mismatch& m = *mismatch;
    out << "result: MISMATCH in " << m.where << " " << (m.where == "static" ? "instance " : "script ") << m.instance
        << ", family " << family_name(m.query.family) << "\n";
    out << "query: " << format_query(m.query) << "\n";
    out << "expected: " << joined(m.expected) << "\n";
    out << "got: " << joined(m.got) << "\n";
    out << m.repro << "\n";
    return out.str();
}

}  // namespace wtgrid
