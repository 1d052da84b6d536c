#include "laxkit/operations.hpp"

#include <cmath>
#include <sstream>

#include "laxkit/elliptic_chain.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/rational_lax.hpp"
#include "laxkit/sklyanin.hpp"

namespace laxkit {

namespace {

// Deterministic low-discrepancy probe points in the period cell.
std::vector<cd> probe_points(const LatticeParams& L, int n)
{
    const TorusDomain cell(1.0, L.tau(), 0.0);
    std::vector<cd> pts;
    for (int k = 0; k < n; ++k) {
        const double a = std::fmod(0.5 + 0.6180339887498949 * k, 1.0);
        const double b = std::fmod(0.25 + 0.7548776662466927 * k, 1.0);
        pts.push_back(cell.omega1 * a + cell.omega2 * b);
    }
    return pts;
}

} // namespace

Json complex_list_to_json(const std::vector<cd>& zs)
{
    Json out = Json::array();
    for (const cd z : zs) {
        out.push_back(complex_to_json(z));
    }
    return out;
}

Json matrix_to_json_rows(const CMatrix& M)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            row.push_back(complex_to_json(M(r, c)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<int> parse_pairing(const std::string& text)
{
    if (text.empty() || text == "canonical") {
        return {};
    }
    if (text.rfind("perm:", 0) != 0) {
        fail(ErrorKind::ParseError, "pairing must be 'canonical' or 'perm:i,j,...'");
    }
    std::vector<int> perm;
    std::stringstream ss(text.substr(5));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            perm.push_back(std::stoi(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            fail(ErrorKind::ParseError, "pairing entry '" + item + "' is not an integer");
        }
    }
    return perm;
}

FactorOutput factor_model(const Model& model, const std::vector<int>& perm, const std::optional<cd>& u1)
{
    FactorOutput out{};
    if (const auto* rep = std::get_if<RationalAdditive>(&model)) {
        if (u1) {
            fail(ErrorKind::InvariantViolation, "u1: applies to multipole_sklyanin input only");
        }
        const RationalMultiplicative m = to_multiplicative(*rep, perm);
        out.residual = reconstruction_error(*rep, m);
        out.tolerance = kRationalFactorTol;
        out.model = model_to_json(m);
    } else if (const auto* mp = std::get_if<MultiPoleSklyanin>(&model)) {
        const FactorizationResult f = factorize_multipole(*mp, u1.value_or(0.0), ZeroPairing{perm});
        out.residual = chain_reconstruction_error(*mp, f.chain, probe_points(mp->L, 20));
        out.tolerance = kChainFactorTol;
        out.model = model_to_json(f.chain);
        out.model["det_zeros"] = complex_list_to_json(f.det_zeros);
        out.model["z_minus"] = complex_list_to_json(f.z_minus);
        out.model["z_tilde"] = complex_list_to_json(f.z_tilde);
        out.model["closure_shift"] = complex_to_json(f.closure_shift);
        out.model["kernel_condition"] = f.kernel_condition;
    } else {
        fail(ErrorKind::InvariantViolation,
             "type: factor takes rational_additive or multipole_sklyanin, got " + model_type(model));
    }
    out.model["reconstruction_residual"] = out.residual;
    out.model["version"] = kToolVersion;
    return out;
}

CMatrix eval_model(const Model& model, cd z)
{
    return std::visit(
        [z](const auto& m) -> CMatrix {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RationalAdditive>) {
                return eval_additive(m, z);
            } else if constexpr (std::is_same_v<T, RationalMultiplicative>) {
                return eval_multiplicative(m, z);
            } else if constexpr (std::is_same_v<T, SklyaninCoords>) {
                return lax_single(m, z);
            } else if constexpr (std::is_same_v<T, MultiPoleSklyanin>) {
                return eval_multipole(m, z);
            } else {
                return chain_product(m, z);
            }
        },
        model);
}

std::vector<cd> model_det_zeros(const Model& model)
{
    if (const auto* a = std::get_if<RationalAdditive>(&model)) {
        return det_zeros(*a);
    }
    if (const auto* m = std::get_if<RationalMultiplicative>(&model)) {
        return det_zeros(to_additive(*m));
    }
    if (const auto* s = std::get_if<SklyaninCoords>(&model)) {
        return det_zeros(*s);
    }
    if (const auto* mp = std::get_if<MultiPoleSklyanin>(&model)) {
        return multipole_det_zeros(*mp);
    }
    fail(ErrorKind::InvariantViolation, "type: det-zeros does not take sklyanin_chain input");
}

} // namespace laxkit
