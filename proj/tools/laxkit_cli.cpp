// laxkit command-line tool.
// Exit codes: 0 pass, 1 check failure, 2 input error, 3 numerical degeneracy.

#include <iostream>

#include "CLI11.hpp"

#include "laxkit/complex_linalg.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/io.hpp"
#include "laxkit/operations.hpp"
#include "laxkit/suites.hpp"

using namespace laxkit;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

Json error_body(const std::string& kind, const std::string& message)
{
    return {{"error", {{"kind", kind}, {"message", message}}}, {"version", kToolVersion}};
}

int cmd_verify(const std::string& suite, const RunConfig& cfg, bool json_stdout)
{
    const Report r = run_suite(suite, cfg);
    const Json j = report_to_json(r);
    if (!cfg.output.empty()) {
        save_json(cfg.output, j);
    }
    if (json_stdout) {
        print_json(j);
    } else {
        std::cout << report_table(r);
    }
    return r.passed() ? kExitPass : kExitCheckFailure;
}

int cmd_factor(const std::string& in, const std::string& out, const std::string& pairing,
               const std::optional<cd>& u1)
{
    const FactorOutput f = factor_model(load_model(in), parse_pairing(pairing), u1);
    save_json(out, f.model);
    print_json({{"output", out}, {"reconstruction_residual", f.residual}, {"tolerance", f.tolerance}});
    return f.passed() ? kExitPass : kExitCheckFailure;
}

int cmd_eval(const std::string& in, cd z)
{
    const Model model = load_model(in);
    const CMatrix M = eval_model(model, z);
    print_json({{"type", model_type(model)},
                {"z", complex_to_json(z)},
                {"L", matrix_to_json_rows(M)},
                {"det", complex_to_json(det(M))},
                {"version", kToolVersion}});
    return kExitPass;
}

int cmd_det_zeros(const std::string& in)
{
    const Model model = load_model(in);
    print_json({{"type", model_type(model)},
                {"det_zeros", complex_list_to_json(model_det_zeros(model))},
                {"version", kToolVersion}});
    return kExitPass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"laxkit: Lax matrices, Poisson brackets and elliptic factorizations"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string suite;
    RunConfig cfg;
    std::string tau_text;
    int samples = 0;
    std::vector<std::string> tols;
    bool json_stdout = false;
    CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", suite, "theta, rmatrix, rational, sklyanin, chain or all")->required();
    verify->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    verify->add_option("--tau", tau_text, "Fix the modulus, RE,IM");
    verify->add_option("--samples", samples, "Sample count for every check");
    verify->add_option("--tol", tols, "Tolerance override name=value (repeatable)");
    verify->add_option("--out", cfg.output, "Write the JSON report to this file");
    verify->add_flag("--json", json_stdout, "Print the JSON report instead of the table");

    std::string in, out, pairing, u1_text, z_text;
    CLI::App* factor = app.add_subcommand("factor", "Multiplicative representation of a model");
    factor->add_option("in", in, "Input model")->required();
    factor->add_option("out", out, "Output model")->required();
    factor->add_option("--pairing", pairing, "canonical or perm:i,j,...");
    factor->add_option("--u1", u1_text, "First bundle parameter, RE,IM (multipole input)");

    CLI::App* eval = app.add_subcommand("eval", "Evaluate L(z)");
    eval->add_option("in", in, "Input model")->required();
    eval->add_option("--z", z_text, "Spectral point RE,IM")->required();

    CLI::App* zeros = app.add_subcommand("det-zeros", "Zeros of det L(z)");
    zeros->add_option("in", in, "Input model")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        print_json(error_body("ParseError", e.what()));
        return kExitInput;
    }

    try {
        if (*verify) {
            if (!tau_text.empty()) {
                cfg.tau = parse_complex(tau_text);
            }
            if (verify->count("--samples")) {
                cfg.samples = samples;
            }
            for (const std::string& t : tols) {
                const auto eq = t.find('=');
                if (eq == std::string::npos) {
                    fail(ErrorKind::ParseError, "tol '" + t + "' is not name=value");
                }
                cfg.tol_overrides[t.substr(0, eq)] = parse_complex(t.substr(eq + 1)).real();
            }
            return cmd_verify(suite, cfg, json_stdout);
        }
        if (*factor) {
            std::optional<cd> u1;
            if (!u1_text.empty()) {
                u1 = parse_complex(u1_text);
            }
            return cmd_factor(in, out, pairing, u1);
        }
        if (*eval) {
            return cmd_eval(in, parse_complex(z_text));
        }
        return cmd_det_zeros(in);
    } catch (const Error& e) {
        print_json(error_body(std::string(to_string(e.kind())), e.what()));
        return is_input_error(e.kind()) ? kExitInput : kExitDegenerate;
    } catch (const std::exception& e) {
        print_json(error_body("Exception", e.what()));
        return kExitDegenerate;
    }
}
