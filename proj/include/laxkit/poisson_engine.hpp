#pragma once

#include <functional>
#include <string>
#include <vector>

#include "laxkit/complex_linalg.hpp"

namespace laxkit {

// Bracket {x_a, x_b} = pi(x)(a, b) on named coordinates.
struct PoissonStructure {
    std::vector<std::string> coord_names;
    std::function<CMatrix(const CVector&)> pi;

    int dim() const { return static_cast<int>(coord_names.size()); }
    // Evaluates pi and enforces antisymmetry to 1e-13 relative.
    CMatrix eval(const CVector& x) const;
};

// Matrix-valued function of coordinates and the spectral parameter, with its analytic
// coordinate Jacobian.
struct MatrixFamily {
    std::function<CMatrix(const CVector&, cd)> eval;
    std::function<std::vector<CMatrix>(const CVector&, cd)> jac;
};

cd bracket_scalar(const PoissonStructure& P, const CVector& grad_f, const CVector& grad_g,
                  const CVector& x);

// Bracket divided by the largest individual term |df_a pi_ab dg_b|; zero when all vanish.
double bracket_normalized(const PoissonStructure& P, const CVector& grad_f,
                          const CVector& grad_g, const CVector& x);

// Cyclic Jacobi sum over coordinate triples, derivatives of pi by central differences,
// normalized by the largest single term.
double jacobi_residual(const PoissonStructure& P, const CVector& x);

// max_a |{C, x_a}| normalized by the largest single term.
double casimir_residual(const PoissonStructure& P, const CVector& grad_c, const CVector& x);

// M_{(ik),(jl)} = sum pi_ab dF_ij/dx_a (w1) dF_kl/dx_b (w2).
CMatrix tensor_bracket(const PoissonStructure& P, const MatrixFamily& F, const CVector& x,
                       cd w1, cd w2);
CMatrix tensor_bracket(const CMatrix& pi, const std::vector<CMatrix>& J1,
                       const std::vector<CMatrix>& J2);

// Block-diagonal direct sum of independent structures.
PoissonStructure direct_sum(const std::vector<PoissonStructure>& parts);

// Finite-difference cross-check of an analytic Jacobian; returns the max relative deviation.
double jacobian_consistency(const MatrixFamily& F, const CVector& x, cd z, double h = 1e-6);

} // namespace laxkit
