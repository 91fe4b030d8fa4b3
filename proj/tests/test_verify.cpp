#include "doctest.h"
#include "test_util.hpp"
#include "wtgrid/verify.hpp"

using namespace wtgrid;
using namespace testutil;

TEST_CASE("default verification passes and is deterministic") {
    VerifyConfig cfg;
    cfg.iterations = 6;
    cfg.scripts = 3;
    VerifyReport a = run_verify(cfg);
    CHECK(!a.mismatch);
    CHECK(a.instances == 6);
    CHECK(a.scripts == 3);
    CHECK(a.checks > 1000);
    CHECK(a.text() == run_verify(cfg).text());
    CHECK(a.text().find("result: PASS") != std::string::npos);
}

TEST_CASE("random instance sizes and every quantile") {
    VerifyConfig cfg;
    cfg.n = 700;
    cfg.random_n = true;
    cfg.all_k = true;
    cfg.iterations = 8;
    cfg.scripts = 0;
    CHECK(!run_verify(cfg).mismatch);
}

TEST_CASE("an injected fault is caught with a reproduction") {
    VerifyConfig cfg;
    cfg.iterations = 3;
    cfg.scripts = 0;
    cfg.n = 200;
    cfg.inject_fault = true;
    VerifyReport rep = run_verify(cfg);
    REQUIRE(rep.mismatch);
    const Mismatch& m = *rep.mismatch;
    CHECK(m.where == "static");
    CHECK(m.instance == 0);
    CHECK(m.expected != m.got);
    CHECK(m.repro.rfind("repro: static seed=1 instance=0", 0) == 0);
    CHECK(m.repro.find("fault=1") != std::string::npos);
    // the minimized input is much smaller than the instance
    auto pos = m.repro.find("points=\"");
    auto end = m.repro.find('"', pos + 8);
    std::string pts = m.repro.substr(pos + 8, end - pos - 8);
    CHECK(std::count(pts.begin(), pts.end(), ';') < 50);
    CHECK(rep.text() == run_verify(cfg).text());
}

TEST_CASE("oracle answers use the index line format") {
    oracle::OracleSet os{{{0, 3, 5}, {1, 1, 2}, {2, 0, 7}, {3, 2, 2}}};
    auto q = parse_query_line("succ --w 3 --rect full", 4);
    CHECK(oracle_answer(os, q, std::nullopt) == std::vector<std::string>{"5"});
    q = parse_query_line("quantile --k 9 --rect full", 4);
    CHECK(oracle_answer(os, q, std::nullopt) == std::vector<std::string>{"undefined"});
    q = parse_query_line("var-stable --rect full", 4);
    CHECK(same_answer(q, {"4.5000000001"}, {"4.5"}));
    CHECK(!same_answer(q, {"4.51"}, {"4.5"}));
}

TEST_CASE("script replay skips operations on empty locations") {
    DynamicIndex idx(16, 16);
    oracle::DynamicOracle ref;
    CHECK(!apply_op(idx, ref, {'d', {1, 1, 0}}));
    CHECK(apply_op(idx, ref, {'i', {1, 1, 4}}));
    CHECK(apply_op(idx, ref, {'u', {1, 1, 6}}));
    CHECK(idx.grid.sum(RectQuery::full()) == 6);
    CHECK(apply_op(idx, ref, {'d', {1, 1, 0}}));
    CHECK(idx.grid.size() == 0);
}
