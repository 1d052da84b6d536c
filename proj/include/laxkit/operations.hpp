#pragma once

// Model-level operations shared by the command-line tool and the Python module.

#include <optional>
#include <string>
#include <vector>

#include "laxkit/io.hpp"

namespace laxkit {

// Reconstruction residual bounds a factorization must meet.
inline constexpr double kRationalFactorTol = 1e-8;
inline constexpr double kChainFactorTol = 1e-7;

struct FactorOutput {
    Json model;      // factored model plus diagnostics, "version" and "reconstruction_residual"
    double residual; // max |L - product| over the probe points
    double tolerance;
    bool passed() const { return residual < tolerance; }
};

// "canonical" (or empty) gives the canonical pairing; "perm:i,j,..." an explicit permutation.
std::vector<int> parse_pairing(const std::string& text);

// rational_additive -> rational_multiplicative; multipole_sklyanin -> sklyanin_chain.
// u1 is accepted for multipole input only.
FactorOutput factor_model(const Model& model, const std::vector<int>& perm = {},
                          const std::optional<cd>& u1 = std::nullopt);

// L(z) for any model; for a chain, the product of its hatted factors.
CMatrix eval_model(const Model& model, cd z);

// Zeros of det L in the finite plane (rational) or a fundamental cell (elliptic). Chains are rejected.
std::vector<cd> model_det_zeros(const Model& model);

Json complex_list_to_json(const std::vector<cd>& zs);
Json matrix_to_json_rows(const CMatrix& M);

} // namespace laxkit
