#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wtgrid/oracle.hpp"
#include "wtgrid/query.hpp"

namespace wtgrid {

// Stable variance must agree with the long double two-pass oracle within
// this relative error (relative to max(1, |exact|)).
inline constexpr double kStableVarRel = 1e-6;

struct VerifyConfig {
    uint64_t n = 512;  // points per static instance (upper bound with random_n)
    uint64_t U = 1 << 12;
    uint64_t W = 1 << 8;
    uint64_t seed = 1;
    uint64_t iterations = 20;  // static instances
    uint64_t rects = 10;       // rectangles per instance
    uint64_t scripts = 4;      // dynamic operation scripts
    uint64_t script_length = 300;  // upper bound; lengths are log-uniform
    bool random_n = false;     // n log-uniform in [1, n]
    bool all_k = false;        // quantile for every k instead of a sample
    bool inject_fault = false;
};

// One script step: 'i' insert, 'd' delete, 'u' update.
struct ScriptOp {
    char kind = 'i';
    Point p;
};

struct Mismatch {
    std::string where;  // "static" or "dynamic"
    uint64_t instance = 0;
    QuerySpec query;
    std::vector<std::string> expected, got;
    std::string repro;  // one line, with the minimized input
};

struct VerifyReport {
    uint64_t instances = 0;
    uint64_t scripts = 0;
    uint64_t operations = 0;
    uint64_t checks = 0;
    std::optional<Mismatch> mismatch;

    std::string text() const;
};

VerifyReport run_verify(const VerifyConfig& cfg);

// Reference answer in the same line format as answer().
std::vector<std::string> oracle_answer(const oracle::OracleSet& os, const QuerySpec& q,
                                       std::optional<Fraction> fixed_alpha);
// Compares index lines with oracle lines; stable variance uses the tolerance.
bool same_answer(const QuerySpec& q, const std::vector<std::string>& got, const std::vector<std::string>& expected);

BuildParams random_params(std::mt19937_64& rng);
// Query of the given family on rectangle r with random parameters.
QuerySpec random_query(std::mt19937_64& rng, Family f, const RectQuery& r, const WeightedPointSet& ps);

std::vector<ScriptOp> random_script(std::mt19937_64& rng, uint64_t length, uint64_t U, uint64_t W);
// Deletes and updates of an empty location are skipped, by index and oracle alike.
bool apply_op(DynamicIndex& idx, oracle::DynamicOracle& ref, const ScriptOp& op);

// Checks every family on one static instance; the first mismatch, if any.
std::optional<Mismatch> check_static(const WeightedPointSet& ps, const BuildParams& params,
                                     const std::vector<RectQuery>& rects, std::mt19937_64& rng, bool all_k,
                                     bool inject_fault, uint64_t* checks = nullptr);
// Replays a script checking every dynamic family after each step.
std::optional<Mismatch> check_script(const std::vector<ScriptOp>& ops, uint64_t U, uint64_t W, const BuildParams& params,
                                     std::mt19937_64& rng, uint64_t* checks = nullptr);

// Fault position used by inject_fault: the middle of the root level.
void apply_fault(Index& idx);

}  // namespace wtgrid
