#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "wtgrid/index.hpp"
#include "wtgrid/query.hpp"
#include "wtgrid/verify.hpp"
#include "wtgrid/workload.hpp"

using namespace wtgrid;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kMismatch = 3 };

// keeps benchmarked answers observable
volatile size_t g_sink = 0;

int exit_code(const Error& e) { return e.code() == Errc::invalid_argument ? kUsage : kData; }

Index load_index(const std::string& path) {
    std::vector<std::string> warnings;
    Index idx = Index::load(path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return idx;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::data, "cannot read " + path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

bool skip_line(const std::string& line) {
    size_t first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
}

std::string one_line(const std::vector<std::string>& lines) {
    std::string s;
    for (size_t i = 0; i < lines.size(); ++i) s += (i ? ";" : "") + lines[i];
    return s;
}

struct BuildArgs {
    std::string input, output;
    uint64_t t = 1, ell = 2;
    std::string alpha;
    std::optional<uint64_t> U, W;
    bool parallel = false;
};

int cmd_build(const BuildArgs& a) {
    WeightedPointSet ps = read_points_file(a.input, a.U, a.W);
    BuildParams p{a.t, a.ell, std::nullopt};
    if (!a.alpha.empty()) p.alpha = Fraction::parse(a.alpha);
    Index idx(ps, p, a.parallel);
    idx.save(a.output);
    std::cerr << "built " << ps.points.size() << " points, U=" << ps.U << " W=" << ps.W << "\n";
    return kOk;
}

struct QueryArgs {
    std::string index, batch;
    bool parallel = false;
};

int cmd_query(const QueryArgs& a, const std::vector<std::string>& tokens) {
    Index idx = load_index(a.index);
    if (a.batch.empty()) {
        for (const auto& line : answer(idx, parse_query(tokens, idx.universe()))) std::cout << line << "\n";
        return kOk;
    }
    if (!tokens.empty()) throw Error(Errc::invalid_argument, "a query and --batch are exclusive");
    std::vector<QuerySpec> specs;
    for (const auto& line : read_lines(a.batch))
        if (!skip_line(line)) specs.push_back(parse_query_line(line, idx.universe()));
    for (const auto& result : run_batch(idx, specs, a.parallel)) std::cout << one_line(result) << "\n";
    return kOk;
}

int cmd_verify(const VerifyConfig& cfg) {
    VerifyReport rep = run_verify(cfg);
    std::cout << rep.text();
    return rep.mismatch ? kMismatch : kOk;
}

int cmd_stats(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::data, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    ContainerHeader h = read_header(bytes);
    Index idx = Index::deserialize(bytes);
    std::cout << "# n=" << h.n << " U=" << h.U << " W=" << h.W << " t=" << h.params.t << " ell=" << h.params.ell
              << " alpha=" << (h.params.alpha ? h.params.alpha->str() : "none") << " distinct=" << idx.minmax().distinct()
              << "\n";
    std::cout << "structure\tbits\tbits_per_point\tformula\tformula_bits_per_point\n";
    for (const auto& r : space_rows(idx))
        std::cout << r.section << "\t" << r.bits << "\t" << format_double(r.bits_per_point) << "\t" << r.formula << "\t"
                  << format_double(r.formula_bits_per_point) << "\n";
    const char* names[] = {"", "grid", "aligned-stats", "fixed-majority", "valuewt"};
    std::cout << "section\tbytes\tbits_per_point\n";
    for (const auto& e : h.sections) {
        std::string name = e.tag >= 1 && e.tag <= 4 ? names[e.tag] : "tag " + std::to_string(e.tag);
        double per = h.n == 0 ? 0.0 : 8.0 * double(e.length) / double(h.n);
        std::cout << name << "\t" << e.length << "\t" << format_double(per) << "\n";
    }
    return kOk;
}

struct BenchArgs {
    std::string index;
    uint64_t queries = 1000;
    uint64_t seed = 1;
    std::vector<std::string> families;
};

int cmd_bench(const BenchArgs& a) {
    Index idx = load_index(a.index);
    std::vector<Family> families;
    if (a.families.empty()) {
        for (Family f : all_families())
            if (f != Family::majority_fixed || idx.fixed_majority()) families.push_back(f);
    } else {
        for (const auto& name : a.families) families.push_back(parse_family(name));
    }
    WeightedPointSet view{{}, idx.universe(), idx.weight_bound()};
    for (uint64_t i = 0; i < std::min<uint64_t>(idx.size(), 4096); ++i) view.points.push_back(idx.grid().point_at(i));
    std::cout << "family\tqueries\tmedian_ns\tp99_ns\n";
    for (Family f : families) {
        std::mt19937_64 rng(workload::mix_seed(a.seed, static_cast<uint64_t>(f)));
        std::vector<QuerySpec> specs;
        for (uint64_t i = 0; i < a.queries; ++i) {
            RectQuery r = workload::anchored_rect(rng, view, 5);
            QuerySpec q = random_query(rng, f, r, WeightedPointSet{{}, view.U, view.W});
            q.k = 1 + rng() % 16;
            specs.push_back(q);
        }
        std::vector<double> ns;
        for (const auto& q : specs) {
            auto t0 = std::chrono::steady_clock::now();
            g_sink = g_sink + answer(idx, q).size();
            ns.push_back(std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
        }
        std::sort(ns.begin(), ns.end());
        auto at = [&](double frac) { return ns.empty() ? 0.0 : ns[std::min(ns.size() - 1, size_t(frac * ns.size()))]; };
        std::cout << family_name(f) << "\t" << specs.size() << "\t" << uint64_t(at(0.5)) << "\t" << uint64_t(at(0.99))
                  << "\n";
    }
    return kOk;
}

struct DynArgs {
    std::string script;
    uint64_t U = 1 << 16, W = 1 << 16, t = 1, ell = 2;
};

int cmd_dyn(const DynArgs& a) {
    DynamicIndex idx(a.U, a.W, a.t, a.ell);
    auto lines = read_lines(a.script);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (skip_line(lines[i])) continue;
        std::istringstream in(lines[i]);
        std::string op;
        in >> op;
        std::vector<std::string> rest;
        for (std::string t; in >> t;) rest.push_back(t);
        auto num = [&](size_t j) -> uint64_t {
            if (j >= rest.size() || rest[j].find_first_not_of("0123456789") != std::string::npos)
                throw Error(Errc::data, "line " + std::to_string(i + 1) + ": expected an unsigned integer");
            return std::stoull(rest[j]);
        };
        auto arity = [&](size_t k) {
            if (rest.size() != k)
                throw Error(Errc::data, "line " + std::to_string(i + 1) + ": " + op + " takes " + std::to_string(k) +
                                            " values");
        };
        try {
            if (op == "ins") {
                arity(3);
                idx.insert({num(0), num(1), num(2)});
            } else if (op == "del") {
                arity(2);
                idx.erase(num(0), num(1));
            } else if (op == "upd") {
                arity(3);
                idx.update(num(0), num(1), num(2));
            } else if (op == "qry") {
                std::cout << one_line(answer(idx, parse_query(rest, a.U))) << "\n";
            } else {
                throw Error(Errc::data, "unknown operation '" + op + "'");
            }
        } catch (const Error& e) {
            std::string what = e.what();
            if (what.rfind("line ", 0) == 0) throw;
            throw Error(e.code() == Errc::invalid_argument ? Errc::invalid_argument : Errc::data,
                        "line " + std::to_string(i + 1) + ": " + what);
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Succinct weighted point grids: build, query, verify, stats, bench, dyn"};
    app.require_subcommand(1);

    BuildArgs build;
    uint64_t build_U = 0, build_W = 0;
    auto* b = app.add_subcommand("build", "Build an index from a points file (x<TAB>y<TAB>w per line)");
    b->add_option("input", build.input, "Points file")->required();
    b->add_option("-o,--output", build.output, "Index file to write")->required();
    b->add_option("--t", build.t, "Block factor t for sums, min/max and fixed majority")->check(CLI::PositiveNumber);
    b->add_option("--ell", build.ell, "Value tree arity ell")->check(CLI::Range(uint64_t(2), uint64_t(1) << 20));
    b->add_option("--alpha", build.alpha, "Fixed majority threshold, e.g. 1/4 (omit to skip)");
    auto* bu = b->add_option("--U", build_U, "Coordinate universe (default: max + 1)");
    auto* bw = b->add_option("--W", build_W, "Weight universe (default: max + 1)");
    b->add_flag("--parallel", build.parallel, "Build levels in parallel");

    QueryArgs query;
    auto* q = app.add_subcommand("query", "Answer one query, or a file of queries with --batch");
    q->add_option("index", query.index, "Index file")->required();
    q->add_option("--batch", query.batch, "File with one query per line");
    q->add_flag("--parallel", query.parallel, "Answer batch queries in parallel");
    q->prefix_command();
    q->footer(
        "Query: FAMILY [--rect x0 y0 x1 y1 | --rect full] [--k K] [--w W] [--w0 A --w1 B]\n"
        "       [--alpha p/q] [--origin X Y --dir NE|NW|SE|SW]\n"
        "Families: count report dominance visibility sum avg var var-stable group-xor group-mod7\n"
        "          min max topk-min topk-max quantile countvr majority-fixed majority succ pred\n"
        "          topk-freq mode");

    VerifyConfig vcfg;
    auto* v = app.add_subcommand("verify", "Compare every query family with the brute-force oracle");
    v->add_option("--n", vcfg.n, "Points per static instance");
    v->add_option("--U", vcfg.U, "Coordinate universe")->check(CLI::PositiveNumber);
    v->add_option("--W", vcfg.W, "Weight universe")->check(CLI::PositiveNumber);
    v->add_option("--seed", vcfg.seed, "Seed");
    v->add_option("--iterations", vcfg.iterations, "Static instances");
    v->add_option("--rects", vcfg.rects, "Rectangles per instance");
    v->add_option("--scripts", vcfg.scripts, "Dynamic operation scripts");
    v->add_option("--script-length", vcfg.script_length, "Longest script");
    v->add_flag("--random-n", vcfg.random_n, "Draw n log-uniformly from [1, n]");
    v->add_flag("--all-k", vcfg.all_k, "Check quantiles for every k");
    v->add_flag("--inject-fault", vcfg.inject_fault, "Flip one bitmap bit of every index (harness self-test)");

    std::string stats_path;
    auto* s = app.add_subcommand("stats", "Space per structure and per section");
    s->add_option("index", stats_path, "Index file")->required();

    BenchArgs bench;
    auto* be = app.add_subcommand("bench", "Latency per query family, TSV");
    be->add_option("index", bench.index, "Index file")->required();
    be->add_option("--queries", bench.queries, "Queries per family");
    be->add_option("--seed", bench.seed, "Seed");
    be->add_option("--families", bench.families, "Families to run (default: all)")->delimiter(',');

    DynArgs dyn;
    auto* d = app.add_subcommand("dyn", "Replay an operation script on the dynamic index");
    d->add_option("script", dyn.script, "Script: ins x y w | del x y | upd x y w | qry FAMILY options")->required();
    d->add_option("--U", dyn.U, "Coordinate universe")->check(CLI::PositiveNumber);
    d->add_option("--W", dyn.W, "Weight universe")->check(CLI::PositiveNumber);
    d->add_option("--t", dyn.t, "Block factor t")->check(CLI::PositiveNumber);
    d->add_option("--ell", dyn.ell, "Value tree arity")->check(CLI::Range(uint64_t(2), uint64_t(1) << 20));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*b) {
            if (*bu) build.U = build_U;
            if (*bw) build.W = build_W;
            return cmd_build(build);
        }
        if (*q) return cmd_query(query, q->remaining());
        if (*v) return cmd_verify(vcfg);
        if (*s) return cmd_stats(stats_path);
        if (*be) return cmd_bench(bench);
        if (*d) return cmd_dyn(dyn);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
