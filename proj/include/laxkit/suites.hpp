#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "laxkit/io.hpp"

namespace laxkit {

struct RunConfig {
    std::uint64_t seed = 42;
    std::map<std::string, double> tol_overrides; // keyed by check name
    std::optional<cd> tau;                       // fixes every modulus draw
    std::optional<int> samples;                  // replaces every per-check sample count
    std::string output;

    // samples >= 1, Im tau >= 0.05, overrides positive.
    void validate() const;
};

enum class CheckStatus { Pass, Fail, Info };

struct Check {
    std::string name;
    int criterion = 0; // acceptance criterion the check belongs to
    CheckStatus status = CheckStatus::Fail;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string comparator; // "<", ">" or "<=": residual must satisfy it against tolerance
    int samples = 0;
    std::map<std::string, cd> constants; // fitted constants, if any
    std::string detail;
    double runtime_ms = 0.0;
};

struct Report {
    std::string suite;
    RunConfig config;
    std::vector<Check> checks; // sorted by name, each name once

    int count(CheckStatus s) const;
    bool passed() const { return count(CheckStatus::Fail) == 0; }
};

const std::vector<std::string>& suite_names(); // theta, rmatrix, rational, sklyanin, chain, all

// Deterministic given cfg. Every suite draws from its own streams seeded by (seed, check group),
// so "all" reproduces the checks of each named suite. Throws UnknownSuite, and InvariantViolation
// for a tolerance override that names no executed check.
Report run_suite(const std::string& name, const RunConfig& cfg);

// Machine report: version, config echo, checks and summary. Excludes runtimes.
Json report_to_json(const Report& r);
// Human-readable table including per-check runtimes.
std::string report_table(const Report& r);

} // namespace laxkit
