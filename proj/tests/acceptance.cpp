// Acceptance suite: one PASS/FAIL line per criterion. Exit status is
// nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "wtgrid/geom.hpp"
#include "wtgrid/io.hpp"
#include "wtgrid/verify.hpp"
#include "wtgrid/workload.hpp"

using namespace wtgrid;

namespace {

// Pinned tolerances and constants.
constexpr uint64_t kStaticInstances = 10000;
constexpr uint64_t kStaticMaxN = 4096;
constexpr uint64_t kStaticMaxU = 1 << 16;
constexpr uint64_t kStaticMaxW = 1 << 20;
constexpr uint64_t kRectsPerInstance = 10;

constexpr uint64_t kScripts = 1000;
constexpr uint64_t kScriptMaxLength = 2000;
constexpr uint64_t kScriptMaxU = 1 << 12;
constexpr uint64_t kScriptMaxW = 1 << 10;

constexpr double kK1 = 8.0;  // grid tree
constexpr double kK2 = 8.0;  // min structure
constexpr double kK3 = 8.0;  // value tree, multiplies log2 m
constexpr double kGapBitsPerPoint = 64.0;

constexpr double kLogSquaredSlopeTol = 1.4;
constexpr double kDominanceSlopeTol = 1.5;

constexpr double kVisitC = 4.0;     // dominance visits <= C (d+1) log2 n
constexpr double kQuantileC = 2.0;  // grid counts <= C ell ceil(log2 m / log2 ell)
constexpr double kTopkC = 1.0;      // top-k frequent probes <= C 4 / alpha_k
constexpr uint64_t kCounterInstances = 1000;

constexpr double kStableRel = kStableVarRel;  // 1e-6
constexpr double kChanRel = 1e-9;
constexpr uint64_t kSerialInstances = 100;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct StaticInstance {
    WeightedPointSet ps;
    BuildParams params;
    std::vector<RectQuery> rects;
};

StaticInstance static_instance(uint64_t i, std::mt19937_64& rng) {
    rng.seed(workload::mix_seed(0xacce97ULL, i));
    StaticInstance s;
    uint64_t n = workload::log_uniform(rng, 1, kStaticMaxN);
    uint64_t U = workload::log_uniform(rng, 1, kStaticMaxU);
    uint64_t W = workload::log_uniform(rng, 1, kStaticMaxW);
    s.ps = workload::random_set(rng, n, U, W);
    s.params = random_params(rng);
    for (uint64_t k = 0; k < kRectsPerInstance; ++k)
        s.rects.push_back(workload::anchored_rect(rng, s.ps, int(k % workload::kRectKinds)));
    return s;
}

Outcome criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    uint64_t checks = 0;
    std::mt19937_64 rng;
    for (uint64_t i = 0; i < kStaticInstances; ++i) {
        StaticInstance s = static_instance(i, rng);
        if (auto m = check_static(s.ps, s.params, s.rects, rng, true, false, &checks))
            return {false, "instance " + std::to_string(i) + " family " + family_name(m->query.family) + " query \"" +
                               format_query(m->query) + "\""};
    }
    return {true, std::to_string(kStaticInstances) + " instances, " + std::to_string(checks) + " checks, " +
                      fmt("%.0f s", elapsed(t0))};
}

Outcome criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    uint64_t checks = 0, ops = 0;
    for (uint64_t s = 0; s < kScripts; ++s) {
        std::mt19937_64 rng(workload::mix_seed(0xd1a2ULL, s));
        uint64_t U = workload::log_uniform(rng, 1, kScriptMaxU);
        uint64_t W = workload::log_uniform(rng, 1, kScriptMaxW);
        uint64_t len = workload::log_uniform(rng, 1, kScriptMaxLength);
        auto script = random_script(rng, len, U, W);
        BuildParams params = random_params(rng);
        ops += script.size();
        if (auto m = check_script(script, U, W, params, rng, &checks))
            return {false, "script " + std::to_string(s) + " step " + std::to_string(m->instance) + " family " +
                               family_name(m->query.family)};
    }
    return {true, std::to_string(kScripts) + " scripts, " + std::to_string(ops) + " operations, " +
                      std::to_string(checks) + " checks, " + fmt("%.0f s", elapsed(t0))};
}

// (a) is the grid's wavelet tree, (b) the min structure (range-minimum
// directories plus sampled rank vectors; max is its mirror), (c) the value
// tree. The tree plus min structure together is reported as well.
Outcome criterion3() {
    Outcome out;
    double worst1 = -1e9, worst2 = -1e9, worst3 = -1e9, combined = -1e9;
    for (uint64_t n : {uint64_t(1) << 12, uint64_t(1) << 16}) {
        std::mt19937_64 rng(n);
        WeightedPointSet ps;
        ps.U = 1 << 20;
        ps.W = 1 << 16;
        for (uint64_t i = 0; i < n; ++i) ps.points.push_back({rng() % ps.U, rng() % ps.U, rng() % ps.W});
        for (uint64_t t : {1, 2, 4, 8}) {
            for (uint64_t ell : {2, 4, 16}) {
                if (ell != 2 && t != 1) continue;  // t only moves the grid side, ell only the value tree
                Index idx(ps, BuildParams{t, ell, std::nullopt});
                double lg = std::log2(double(n)), dn = double(n), bound = lg * (1 + 1.0 / double(t));
                SpaceReport sr = idx.grid().space_report();
                uint64_t minbits = idx.minmax().space().min_structure();
                double m = double(idx.minmax().distinct()), lm = std::log2(m);
                worst1 = std::max(worst1, double(sr.tree_bits) / dn - bound);
                worst2 = std::max(worst2, double(minbits) / dn - bound);
                worst3 = std::max(worst3, (double(idx.values().bits()) / dn - lg * std::ceil(lm / std::log2(double(ell)))) / lm);
                combined = std::max(combined, double(sr.tree_bits + minbits) / dn - bound);
            }
        }
    }
    out.pass = worst1 <= kK1 && worst2 <= kK2 && worst3 <= kK3;
    out.detail = "measured K1=" + fmt("%.2f", worst1) + " K2=" + fmt("%.2f", worst2) + " K3=" + fmt("%.2f", worst3) +
                 " (limits " + fmt("%.0f", kK1) + ", " + fmt("%.0f", kK2) + ", " + fmt("%.0f", kK3) +
                 "); tree plus min structure exceeds log2 n (1+1/t) by at most " + fmt("%.2f", combined) + " bits/point";
    return out;
}

Outcome criterion4() {
    Outcome out;
    std::string detail;
    for (uint64_t U : {uint64_t(1) << 16, uint64_t(1) << 20}) {
        uint64_t n = 1 << 14;
        std::mt19937_64 rng(U);
        WeightedPointSet ps;
        ps.U = U;
        ps.W = 1;
        for (uint64_t i = 0; i < n; ++i) ps.points.push_back({rng() % U, rng() % U, 0});
        SpaceReport sr = RankGrid(ps).space_report();
        double excess = (double(sr.index_bits()) - sr.optimal_bits) / double(n);
        out.pass = out.pass && excess <= kGapBitsPerPoint;
        detail += (detail.empty() ? "" : ", ") + std::string("U=2^") + std::to_string(int(std::log2(double(U)))) +
                  ": " + fmt("%.2f", excess) + " bits/point over optimal";
    }
    out.detail = detail + " (limit " + fmt("%.0f", kGapBitsPerPoint) + ")";
    return out;
}

// Least-squares slope of y on x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

// Median per-call time in nanoseconds over groups of calls.
double median_ns(size_t calls, const std::function<void(size_t)>& call) {
    constexpr size_t kGroup = 16;
    std::vector<double> per;
    for (size_t g = 0; g + kGroup <= calls; g += kGroup) {
        auto t0 = std::chrono::steady_clock::now();
        for (size_t i = g; i < g + kGroup; ++i) call(i);
        per.push_back(elapsed(t0) * 1e9 / kGroup);
    }
    std::nth_element(per.begin(), per.begin() + per.size() / 2, per.end());
    return per[per.size() / 2];
}

volatile uint64_t g_sink = 0;

Outcome criterion5() {
    std::vector<double> lx, ref, lcount, lquant;
    std::string table;
    for (unsigned e = 10; e <= 18; ++e) {
        uint64_t n = uint64_t(1) << e;
        std::mt19937_64 rng(e);
        WeightedPointSet ps;
        ps.U = 1 << 20;
        ps.W = 1 << 16;
        for (uint64_t i = 0; i < n; ++i) ps.points.push_back({rng() % ps.U, rng() % ps.U, rng() % ps.W});
        Index idx(ps, BuildParams{1, 2, std::nullopt});
        std::vector<RectQuery> rects;
        std::vector<uint64_t> ks;
        while (rects.size() < 4096) {
            RectQuery r = workload::random_rect(rng, ps.U, 5);
            uint64_t c = idx.grid().count(r);
            if (c == 0) continue;
            rects.push_back(r);
            ks.push_back(1 + rng() % c);
        }
        // warm-up pass, then timed passes
        for (size_t i = 0; i < rects.size(); ++i) g_sink = g_sink + idx.grid().count(rects[i]);
        double tc = median_ns(rects.size(), [&](size_t i) { g_sink = g_sink + idx.grid().count(rects[i]); });
        double tq = median_ns(rects.size(), [&](size_t i) { g_sink = g_sink + idx.values().quantile(rects[i], ks[i]).value; });
        double lg = std::log2(double(n));
        lx.push_back(std::log(double(n)));
        ref.push_back(std::log(lg * lg));
        lcount.push_back(std::log(tc));
        lquant.push_back(std::log(tq));
        table += " n=2^" + std::to_string(e) + ":" + fmt("%.0f", tc) + "/" + fmt("%.0f", tq) + "ns";
    }
    double sref = slope(lx, ref), sc = slope(lx, lcount), sq = slope(lx, lquant);

    // dominance on staircases with exactly d maximal points
    std::vector<double> dl;
    std::vector<uint64_t> ds = {1, 16, 256};
    for (uint64_t d : ds) {
        uint64_t n = 1 << 14, U = 1 << 20, corner = U - 1024;
        std::mt19937_64 rng(d);
        WeightedPointSet ps;
        ps.U = U;
        ps.W = 1;
        for (uint64_t i = 0; i < d; ++i) ps.points.push_back({corner + i, corner + d - 1 - i, 0});
        while (ps.points.size() < n) ps.points.push_back({rng() % corner, rng() % corner, 0});
        RankGrid g(ps);
        RectQuery full = RectQuery::full();
        if (dominating_points(g, full).size() != d) return {false, "staircase construction broken"};
        dl.push_back(median_ns(d >= 256 ? 800 : 8000, [&](size_t) { g_sink = g_sink + dominating_points(g, full).size(); }));
    }
    double s1 = (dl[1] - dl[0]) / double(ds[1] - ds[0]), s2 = (dl[2] - dl[1]) / double(ds[2] - ds[1]);
    double ratio = std::max(s1, s2) / std::min(s1, s2);

    Outcome out;
    bool count_ok = sc <= kLogSquaredSlopeTol * sref, quant_ok = sq <= kLogSquaredSlopeTol * sref;
    bool dom_ok = s1 > 0 && s2 > 0 && ratio <= kDominanceSlopeTol;
    out.pass = count_ok && quant_ok && dom_ok;
    out.detail = "log-log slopes count " + fmt("%.3f", sc) + ", quantile " + fmt("%.3f", sq) + " vs log^2 n " +
                 fmt("%.3f", sref) + " (limit x" + fmt("%.1f", kLogSquaredSlopeTol) + "); dominance ns per point " +
                 fmt("%.1f", s1) + " / " + fmt("%.1f", s2) + " ratio " + fmt("%.2f", ratio) + " (limit " +
                 fmt("%.1f", kDominanceSlopeTol) + ");" + table;
    return out;
}

Outcome criterion6() {
    double worst_visit = 0, worst_quant = 0, worst_topk = 0;
    uint64_t probe_violations = 0, samples = 0;
    std::mt19937_64 rng;
    for (uint64_t i = 0; i < kCounterInstances; ++i) {
        StaticInstance s = static_instance(i, rng);
        Index idx(s.ps, s.params);
        oracle::OracleSet os{s.ps.points};
        double n = double(std::max<uint64_t>(s.ps.points.size(), 2)), lg = std::log2(n);
        double m = double(std::max<uint64_t>(idx.minmax().distinct(), 2));
        double ell = double(s.params.ell);
        double levels = std::max(1.0, std::ceil(std::log2(m) / std::log2(ell)));
        for (const auto& r : s.rects) {
            ++samples;
            GeomStats gs;
            auto dom = dominating_points(idx.grid(), r, &gs);
            worst_visit = std::max(worst_visit, double(gs.visits) / (double(dom.size() + 1) * lg));
            uint64_t c = idx.grid().count(r);
            for (uint64_t k : {uint64_t(1), (c + 1) / 2, c}) {
                if (c == 0) break;
                ValueStats vs;
                idx.values().quantile(r, k, &vs);
                worst_quant = std::max(worst_quant, double(vs.grid_counts) / (ell * levels));
            }
            for (Fraction a : {Fraction{1, 2}, Fraction{1, 3}, Fraction{1, 8}, Fraction{17, 50}, Fraction{11, 100}}) {
                ValueStats vs;
                idx.values().majority(r, a, &vs);
                if (vs.probes > (a.den + a.num - 1) / a.num + 1) ++probe_violations;
            }
            ValueStats vs;
            auto top = idx.values().top_k_frequent(r, 1 + rng() % 8, &vs);
            if (!top.empty()) {
                double alpha_k = double(top.back().count) / double(c);
                worst_topk = std::max(worst_topk, double(vs.probes) / (4.0 / alpha_k));
            }
        }
    }
    Outcome out;
    out.pass = worst_visit <= kVisitC && worst_quant <= kQuantileC && probe_violations == 0 && worst_topk <= kTopkC;
    out.detail = std::to_string(samples) + " rectangles; max visits/((d+1) log2 n) " + fmt("%.2f", worst_visit) +
                 " (C=" + fmt("%.0f", kVisitC) + "), max grid counts/(ell levels) " + fmt("%.2f", worst_quant) +
                 " (C=" + fmt("%.0f", kQuantileC) + "), variable-alpha probe violations " +
                 std::to_string(probe_violations) + ", max top-k probes/(4/alpha_k) " + fmt("%.2f", worst_topk) +
                 " (C=" + fmt("%.0f", kTopkC) + ")";
    return out;
}

Outcome criterion7() {
    std::mt19937_64 rng(7);
    WeightedPointSet ps;
    ps.U = 1 << 14;
    ps.W = 1000011;
    for (int i = 0; i < 1 << 14; ++i) ps.points.push_back({rng() % ps.U, rng() % ps.U, 1000000 + rng() % 11});
    oracle::OracleSet os{ps.points};
    double worst_stable = 0, worst_chan = 0;
    for (uint64_t t : {1, 2, 8}) {
        Index idx(ps, BuildParams{t, 2, std::nullopt});
        for (int j = 0; j < 400; ++j) {
            RectQuery q = workload::random_rect(rng, ps.U, j % 2 ? 5 : 0);
            auto got = idx.sums().var_stable(q);
            auto want = oracle::var_two_pass(os, q);
            if (got.has_value() != want.has_value()) return {false, "defined-ness differs"};
            if (!got) continue;
            double rel = std::fabs(*got - double(*want)) / std::max(1.0, std::fabs(double(*want)));
            worst_stable = std::max(worst_stable, rel);

            auto bands = idx.sums().bands(idx.grid().map_rect(q));
            if (bands.size() < 2) continue;
            BandSummary left, right;
            for (const auto& b : bands) left = merge_bands(left, b);
            for (auto it = bands.rbegin(); it != bands.rend(); ++it) right = merge_bands(*it, right);
            double scale = std::max(1.0, std::fabs(left.spread));
            worst_chan = std::max(worst_chan, std::fabs(left.spread - right.spread) / scale);
        }
    }
    Outcome out;
    out.pass = worst_stable <= kStableRel && worst_chan <= kChanRel;
    out.detail = "max stable-variance error " + fmt("%.2e", worst_stable) + " (limit " + fmt("%.0e", kStableRel) +
                 "), max merge-order difference " + fmt("%.2e", worst_chan) + " (limit " + fmt("%.0e", kChanRel) + ")";
    return out;
}

Outcome criterion8() {
    uint64_t compared = 0;
    for (uint64_t i = 0; i < kSerialInstances; ++i) {
        std::mt19937_64 rng(workload::mix_seed(0x5e71a1ULL, i));
        uint64_t n = workload::log_uniform(rng, 1, kStaticMaxN);
        WeightedPointSet ps = workload::random_set(rng, n, workload::log_uniform(rng, 1, kStaticMaxU),
                                                   workload::log_uniform(rng, 1, kStaticMaxW));
        BuildParams params = random_params(rng);
        if (i % 3 == 0) params.alpha.reset();
        Index fresh(ps, params);
        std::string bytes = fresh.serialize();
        if (Index(ps, params).serialize() != bytes || Index(ps, params, true).serialize() != bytes)
            return {false, "instance " + std::to_string(i) + ": build is not byte-deterministic"};
        Index loaded = Index::deserialize(bytes);
        for (int j = 0; j < 10; ++j) {
            RectQuery r = workload::anchored_rect(rng, ps, j % workload::kRectKinds);
            for (Family f : all_families()) {
                if (f == Family::majority_fixed && !params.alpha) continue;
                QuerySpec q = random_query(rng, f, r, ps);
                ++compared;
                if (answer(loaded, q) != answer(fresh, q))
                    return {false, "instance " + std::to_string(i) + ": loaded index differs on " + format_query(q)};
            }
        }
        for (const auto& e : read_header(bytes).sections) {
            std::string bad = bytes;
            bad[e.offset + rng() % std::max<uint64_t>(e.length, 1)] ^= char(1 + rng() % 255);
            try {
                Index::deserialize(bad);
                return {false, "instance " + std::to_string(i) + ": corrupted section " + std::to_string(e.tag) + " accepted"};
            } catch (const Error& err) {
                if (err.code() != Errc::corrupt) return {false, "wrong error for a corrupted section"};
            }
        }
    }
    return {true, std::to_string(kSerialInstances) + " instances, " + std::to_string(compared) +
                      " answers equal after reload, builds byte-identical, every corrupted section rejected"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria 1-8"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"oracle equivalence, static", criterion1},
        {"oracle equivalence, dynamic", criterion2},
        {"space per point", criterion3},
        {"optimality gap", criterion4},
        {"scaling shape", criterion5},
        {"work counters", criterion6},
        {"numerical stability", criterion7},
        {"serialization", criterion8},
    };
    bool all = true;
    for (int c = 1; c <= 8; ++c) {
        if (!only.empty() && std::find(only.begin(), only.end(), c) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[c - 1].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << c << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[c - 1].first << ": "
                  << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
