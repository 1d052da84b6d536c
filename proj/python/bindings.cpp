// Python extension laxkit._core. Models cross the boundary as JSON text in the CLI schema;
// the laxkit package turns it into dicts.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "laxkit/errors.hpp"
#include "laxkit/io.hpp"
#include "laxkit/operations.hpp"
#include "laxkit/poisson_engine.hpp"
#include "laxkit/sklyanin.hpp"
#include "laxkit/special_functions.hpp"
#include "laxkit/suites.hpp"

namespace py = pybind11;
using namespace laxkit;

namespace {

Char parse_char(const std::string& ch)
{
    if (ch == "00") return Char::c00;
    if (ch == "01") return Char::c01;
    if (ch == "10") return Char::c10;
    if (ch == "11") return Char::c11;
    fail(ErrorKind::ParseError, "characteristic must be one of 00, 01, 10, 11, got '" + ch + "'");
}

Model parse_model(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, e.what());
    }
    return model_from_json(j);
}

PoissonStructure sklyanin_structure(int n, cd tau, const CVector& x)
{
    const PoissonStructure P = structure(n, LatticeParams(tau));
    if (x.size() != P.dim()) {
        fail(ErrorKind::DimensionMismatch,
             "x has " + std::to_string(x.size()) + " entries, expected " + std::to_string(P.dim()));
    }
    return P;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Lax matrices, Poisson brackets and elliptic factorizations (C++ core)";
    m.attr("__version__") = kToolVersion;

    // Carries .kind (the C++ ErrorKind name) and .input_error. Leaked so it outlives the interpreter.
    static const auto* error_type = new py::exception<Error>(m, "LaxkitError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object exc = py::handle(error_type->ptr())(e.what());
            exc.attr("kind") = std::string(to_string(e.kind()));
            exc.attr("input_error") = is_input_error(e.kind());
            PyErr_SetObject(error_type->ptr(), exc.ptr());
        }
    });

    m.def("theta", [](const std::string& ch, cd z, cd tau, int order) {
        return theta_tau(parse_char(ch), z, tau, LatticeParams::kDefaultTol, order);
    }, py::arg("ch"), py::arg("z"), py::arg("tau"), py::arg("order") = 0,
          "Jacobi theta with characteristic '00', '01', '10' or '11', or its z-derivative of given order.");
    m.def("sigma", [](cd z, cd tau) { return sigma(z, LatticeParams(tau)); }, py::arg("z"), py::arg("tau"),
          "Weierstrass sigma for the lattice Z + tau Z.");
    m.def("weierstrass_zeta", [](cd z, cd tau) { return weierstrass_zeta(z, LatticeParams(tau)); },
          py::arg("z"), py::arg("tau"));
    m.def("phi", [](cd w, cd z, cd tau) { return phi(w, z, LatticeParams(tau)); }, py::arg("w"), py::arg("z"),
          py::arg("tau"), "Kronecker function phi(w, z).");

    m.def("validate_model", [](const std::string& text) { return model_to_json(parse_model(text)).dump(); },
          py::arg("model_json"), "Parse and validate a model; returns its canonical JSON.");
    m.def("eval", [](const std::string& text, cd z) { return eval_model(parse_model(text), z); },
          py::arg("model_json"), py::arg("z"), "L(z) as a complex matrix.");
    m.def("det_zeros", [](const std::string& text) { return model_det_zeros(parse_model(text)); },
          py::arg("model_json"), "Zeros of det L.");
    m.def("factor", [](const std::string& text, const std::string& pairing, std::optional<cd> u1) {
        const FactorOutput f = factor_model(parse_model(text), parse_pairing(pairing), u1);
        return py::make_tuple(f.model.dump(), f.residual, f.tolerance);
    }, py::arg("model_json"), py::arg("pairing") = "canonical", py::arg("u1") = py::none(),
          "Multiplicative form of a model; returns (model_json, residual, tolerance).");

    m.def("sklyanin_bracket_matrix", [](int n, cd tau, const CVector& x) {
        const PoissonStructure P = sklyanin_structure(n, tau, x);
        return py::make_tuple(P.coord_names, P.eval(x));
    }, py::arg("n"), py::arg("tau"), py::arg("x"),
          "Coordinate names (u, s0..s3) and Poisson matrix of the order-n Sklyanin bracket (n = 1, 2, 3) at x.");
    m.def("sklyanin_jacobi_residual", [](int n, cd tau, const CVector& x) {
        return jacobi_residual(sklyanin_structure(n, tau, x), x);
    }, py::arg("n"), py::arg("tau"), py::arg("x"));

    m.def("suite_names", &suite_names);
    m.def("verify", [](const std::string& suite, std::uint64_t seed, std::optional<cd> tau, std::optional<int> samples,
                       const std::map<std::string, double>& tol) {
        RunConfig cfg;
        cfg.seed = seed;
        cfg.tau = tau;
        cfg.samples = samples;
        cfg.tol_overrides = tol;
        py::gil_scoped_release release;
        return report_to_json(run_suite(suite, cfg)).dump();
    }, py::arg("suite"), py::arg("seed") = 42, py::arg("tau") = py::none(), py::arg("samples") = py::none(),
          py::arg("tol") = std::map<std::string, double>{}, "Run a verification suite; returns the JSON report.");
}
