// Acceptance run: one line per criterion, exit 0 iff every criterion passes.
// Usage: acceptance <path-to-laxkit-cli> <scratch-dir>
//
// Criteria 1-11 are read from the JSON report of `laxkit verify all`. Criterion 12 runs the
// CLI twice with one seed and compares the reports byte for byte, then round-trips every
// model schema through JSON.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "laxkit/errors.hpp"
#include "laxkit/io.hpp"
#include "laxkit/sampling.hpp"

using namespace laxkit;
namespace fs = std::filesystem;

namespace {

const std::map<int, const char*> kTitles{
    {1, "theta layer: quasi-periodicity, parity, Jacobi quartic, Riemann relations"},
    {2, "r-matrices: CYBE rational and elliptic, negative control"},
    {3, "rational factorization: reconstruction and det multiplicativity"},
    {4, "rational brackets: linear, quadratic, leaf scalars"},
    {5, "Sklyanin algebra: Jacobi, negative control, Casimirs, ranks"},
    {6, "recursions rec-2 and rec-3"},
    {7, "determinant identity"},
    {8, "r-matrix proportionality and cross-factor brackets"},
    {9, "leaf two-form evaluator: closed form, forced pair, n = 4"},
    {10, "multi-pole elliptic factorization"},
    {11, "chain identities: inverse, residues, z-minus, omega2"},
    {12, "CLI determinism and schema round-trips"},
};

int run(const std::string& cmd)
{
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Lossless when the re-serialized text is identical and reparses to the same model text.
bool round_trip(const Model& m, const fs::path& file, std::string& why)
{
    const Json first = model_to_json(m);
    save_json(file.string(), first);
    const Model back = load_model(file.string());
    const Json second = model_to_json(back);
    if (first.dump() != second.dump()) {
        why = model_type(m) + " changed after a round trip";
        return false;
    }
    return true;
}

std::vector<Model> schema_samples()
{
    Sampler rng(12);
    const LatticeParams L(rng.tau());
    std::vector<Model> out;
    out.emplace_back(random_additive(rng, 3, 2));
    out.emplace_back(random_multiplicative(rng, 2, 3));
    out.emplace_back(random_sklyanin(rng, L));
    const MultiPoleSklyanin mp = random_multipole(rng, L, 2);
    out.emplace_back(mp);
    out.emplace_back(factorize_multipole(mp, cd(0.1, 0.05)).chain);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc != 3) {
        std::cerr << "usage: acceptance <laxkit-cli> <scratch-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path dir = argv[2];
    fs::create_directories(dir);

    const fs::path r1 = dir / "verify_all_run1.json";
    const fs::path r2 = dir / "verify_all_run2.json";
    const int code1 = run(cli + " verify all --seed 42 --out " + r1.string() + " > " + (dir / "run1.txt").string());
    const int code2 = run(cli + " verify all --seed 42 --out " + r2.string() + " > " + (dir / "run2.txt").string());

    std::map<int, int> checks, failed;
    std::map<int, std::string> worst;
    try {
        const Json report = Json::parse(slurp(r1));
        for (const Json& c : report.at("checks")) {
            const int k = c.at("criterion").get<int>();
            ++checks[k];
            if (c.at("status") == "fail") {
                ++failed[k];
                worst[k] += " " + c.at("name").get<std::string>();
            }
        }
    } catch (const std::exception& e) {
        std::cout << "report unreadable: " << e.what() << '\n';
    }

    // Criterion 12.
    std::vector<std::string> problems;
    if (code1 != code2) {
        problems.push_back("exit codes differ");
    }
    const std::string a = slurp(r1), b = slurp(r2);
    if (a.empty() || a != b) {
        problems.push_back("reports differ");
    }
    try {
        int i = 0;
        for (const Model& m : schema_samples()) {
            std::string why;
            if (!round_trip(m, dir / ("model_" + std::to_string(i++) + ".json"), why)) {
                problems.push_back(why);
            }
        }
    } catch (const Error& e) {
        problems.push_back(e.what());
    }
    if (run(cli + " verify no_such_suite > /dev/null") != 2) {
        problems.push_back("unknown suite does not exit with 2");
    }

    bool all_pass = true;
    for (const auto& [k, title] : kTitles) {
        bool ok;
        std::ostringstream detail;
        if (k == 12) {
            ok = problems.empty();
            detail << (ok ? "2 identical reports, 5 schemas lossless" : "");
            for (const std::string& p : problems) {
                detail << p << "; ";
            }
        } else {
            ok = checks[k] > 0 && failed[k] == 0;
            detail << checks[k] << " checks, " << failed[k] << " failed" << worst[k];
        }
        all_pass = all_pass && ok;
        std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << (k < 10 ? " " : "") << k << "  " << title
                  << "  (" << detail.str() << ")\n";
    }
    return all_pass ? 0 : 1;
}
