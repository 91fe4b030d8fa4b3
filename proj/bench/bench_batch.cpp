// Serial reference against the OpenMP path: index build and a batch of
// mixed queries. Prints TSV and exits nonzero if the two paths disagree.
#include <chrono>
#include <iostream>
#include <random>

#include <omp.h>

#include "CLI11.hpp"
#include "wtgrid/query.hpp"
#include "wtgrid/verify.hpp"
#include "wtgrid/workload.hpp"

using namespace wtgrid;

namespace {

template <typename Fn>
double seconds(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial versus parallel build and batch queries"};
    uint64_t n = 1 << 16, U = 1 << 20, W = 1 << 12, queries = 20000, seed = 1, t = 2, ell = 4;
    app.add_option("--n", n, "Points");
    app.add_option("--U", U, "Coordinate universe");
    app.add_option("--W", W, "Weight universe");
    app.add_option("--queries", queries, "Queries in the batch");
    app.add_option("--seed", seed, "Seed");
    app.add_option("--t", t, "Block factor t");
    app.add_option("--ell", ell, "Value tree arity");
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    WeightedPointSet ps = workload::random_set(rng, n, U, W);
    BuildParams params{t, ell, Fraction{1, 4}};

    std::string serial_bytes, parallel_bytes;
    double build_serial = seconds([&] { serial_bytes = Index(ps, params, false).serialize(); });
    double build_parallel = seconds([&] { parallel_bytes = Index(ps, params, true).serialize(); });

    Index idx(ps, params);
    std::vector<QuerySpec> specs;
    for (uint64_t i = 0; i < queries; ++i) {
        Family f = all_families()[rng() % all_families().size()];
        if (f == Family::report || f == Family::visibility) f = Family::count;
        QuerySpec q = random_query(rng, f, workload::anchored_rect(rng, ps, 5), WeightedPointSet{{}, U, W});
        q.k = 1 + rng() % 16;
        specs.push_back(q);
    }
    std::vector<std::vector<std::string>> serial, parallel;
    double batch_serial = seconds([&] { serial = run_batch(idx, specs, false); });
    double batch_parallel = seconds([&] { parallel = run_batch(idx, specs, true); });

    bool same = serial_bytes == parallel_bytes && serial == parallel;
    std::cout << "phase\tthreads\tserial_s\tparallel_s\tspeedup\tidentical\n";
    auto row = [&](const char* name, double s, double p) {
        std::cout << name << "\t" << omp_get_max_threads() << "\t" << s << "\t" << p << "\t" << (p > 0 ? s / p : 0.0)
                  << "\t" << (same ? "yes" : "no") << "\n";
    };
    row("build", build_serial, build_parallel);
    row("batch", batch_serial, batch_parallel);
    return same ? 0 : 1;
}
