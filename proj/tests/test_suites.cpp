#include "doctest.h"

#include <set>

#include "laxkit/errors.hpp"
#include "laxkit/suites.hpp"

using namespace laxkit;

namespace {

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::NonConvergent;
}

RunConfig small(std::uint64_t seed = 42)
{
    RunConfig cfg;
    cfg.seed = seed;
    cfg.samples = 3;
    return cfg;
}

} // namespace

TEST_CASE("unknown suite and invalid configs")
{
    CHECK(kind_of([] { run_suite("everything", {}); }) == ErrorKind::UnknownSuite);
    RunConfig cfg;
    cfg.samples = 0;
    CHECK(kind_of([&] { run_suite("theta", cfg); }) == ErrorKind::InvariantViolation);
    cfg = {};
    cfg.tau = cd(0.0, 0.01);
    CHECK(kind_of([&] { run_suite("theta", cfg); }) == ErrorKind::InvariantViolation);
    cfg = small();
    cfg.tol_overrides["theta.no_such_check"] = 1.0;
    CHECK(kind_of([&] { run_suite("theta", cfg); }) == ErrorKind::InvariantViolation);
}

TEST_CASE("reports are sorted, unique and summarized consistently")
{
    const Report r = run_suite("theta", small());
    REQUIRE(!r.checks.empty());
    std::set<std::string> names;
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
        names.insert(r.checks[i].name);
        if (i > 0) {
            CHECK(r.checks[i - 1].name < r.checks[i].name);
        }
        CHECK(r.checks[i].criterion == 1);
    }
    CHECK(names.size() == r.checks.size());
    const Json j = report_to_json(r);
    CHECK(j["summary"]["total"] == r.checks.size());
    CHECK(j["summary"]["passed"].get<int>() + j["summary"]["failed"].get<int>() + j["summary"]["info"].get<int>() ==
          static_cast<int>(r.checks.size()));
    CHECK(j["version"] == kToolVersion);
    CHECK(j["config"]["seed"] == 42);
    CHECK(j["config"]["samples"] == 3);
    CHECK(report_table(r).find("theta.jacobi_quartic") != std::string::npos);
}

TEST_CASE("deterministic given the seed; seed matters")
{
    const std::string a = report_to_json(run_suite("rmatrix", small(7))).dump();
    const std::string b = report_to_json(run_suite("rmatrix", small(7))).dump();
    const std::string c = report_to_json(run_suite("rmatrix", small(8))).dump();
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("a named suite reproduces its checks inside all")
{
    RunConfig cfg = small(5);
    cfg.samples = 1;
    const Report all = run_suite("all", cfg);
    const Report theta = run_suite("theta", cfg);
    for (const Check& t : theta.checks) {
        const auto it = std::find_if(all.checks.begin(), all.checks.end(), [&](const Check& c) { return c.name == t.name; });
        REQUIRE(it != all.checks.end());
        CHECK(it->residual == t.residual);
    }
    std::set<int> criteria;
    for (const Check& c : all.checks) {
        criteria.insert(c.criterion);
    }
    CHECK(criteria == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
}

TEST_CASE("tolerance overrides and fixed modulus")
{
    RunConfig cfg = small();
    cfg.tol_overrides["theta.jacobi_quartic"] = 1e-300;
    const Report r = run_suite("theta", cfg);
    for (const Check& c : r.checks) {
        if (c.name == "theta.jacobi_quartic") {
            CHECK(c.tolerance == 1e-300);
            CHECK(c.status == CheckStatus::Fail);
        }
    }
    CHECK(!r.passed());

    RunConfig fixed = small();
    fixed.tau = cd(0.1, 1.2);
    const Report f = run_suite("theta", fixed);
    CHECK(f.passed());
    CHECK(report_to_json(f)["config"]["tau"] == Json::array({0.1, 1.2}));
}
