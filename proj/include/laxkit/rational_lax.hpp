#pragma once

#include <functional>
#include <vector>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/poisson_engine.hpp"

namespace laxkit {

// Simple pole a b^T / (z - z_i).
struct RationalPole {
    cd z;
    CVector a;
    CVector b;
};

// L(z) = L0 + sum_i a_i b_i^T / (z - z_i).
struct RationalAdditive {
    CMatrix L0;
    std::vector<RationalPole> poles;

    int N() const { return static_cast<int>(L0.rows()); }
    int d() const { return static_cast<int>(poles.size()); }
    // Square diagonal L0, vector sizes, pole gaps > 1e-8. Throws InvariantViolation
    // naming the offending field.
    void validate() const;
};

// B_i(z) = I + p q^T / (z - z_i); det B_i = (z - z_i^-) / (z - z_i) with z_i^- = z_i - q^T p.
struct RationalFactor {
    cd z;
    CVector p;
    CVector q;

    cd z_minus() const { return z - q.cwiseProduct(p).sum(); }
};

// L(z) = L0 B_1(z) ... B_d(z).
struct RationalMultiplicative {
    CMatrix L0;
    std::vector<RationalFactor> factors;

    int N() const { return static_cast<int>(L0.rows()); }
    int d() const { return static_cast<int>(factors.size()); }
    // As RationalAdditive::validate, plus distinct {z_i, z_i^-} and the factor determinant law.
    void validate() const;
};

struct LeafInvariants {
    CVector K0;
    CVector K1;
    std::vector<cd> orbit_scalars; // b_i^T a_i, resp. q_i^T p_i
};

CMatrix eval_additive(const RationalAdditive& rep, cd z);
CMatrix eval_multiplicative(const RationalMultiplicative& m, cd z);
CMatrix factor_matrix(const RationalFactor& f, cd z);

RationalAdditive to_additive(const RationalMultiplicative& m);

// Zeros of det L(z) prod (z - z_i) / det L0, a monic degree-d polynomial, sorted lexicographically.
std::vector<cd> det_zeros(const RationalAdditive& rep);

// pairing[i] = index of the lexicographically sorted det zero assigned to pole i.
// Empty pairing selects the canonical one: the k-th pole in lexicographic order takes the
// k-th zero.
RationalMultiplicative to_multiplicative(const RationalAdditive& rep,
                                         const std::vector<int>& pairing = {});
std::vector<int> canonical_pairing(const RationalAdditive& rep);

// max over points of max|L_m(z) - L_a(z)| / max|L_a(z)|. Default points: 20 on a circle
// enclosing every pole.
double reconstruction_error(const RationalAdditive& rep, const RationalMultiplicative& m,
                            const std::vector<cd>& points = {});
std::vector<cd> sample_points(const RationalAdditive& rep, int count = 20);

// P / z.
CMatrix rational_r(cd z, int N);

// ||[r12(u-v), r13(u)] + [r12(u-v), r23(v)] + [r13(u), r23(v)]||_F normalized by the sum of
// pairwise products of the three operand norms.
double cybe_residual(const std::function<CMatrix(cd)>& r, cd u, cd v, int N);

// Coordinates per pole: (a_i, b_i) resp. (p_i, q_i), each block of length 2N.
// Bracket {second^l, first^l} = 1 inside each block.
PoissonStructure pole_pair_structure(int N, int d);
CVector coordinates(const RationalAdditive& rep);
CVector coordinates(const RationalMultiplicative& m);
MatrixFamily additive_family(const RationalAdditive& rep);
MatrixFamily multiplicative_family(const RationalMultiplicative& m);

// Normalized distance between the engine bracket and [P/(w1-w2), L1 (x) I + I (x) L2].
double bracket_check_linear(const RationalAdditive& rep, cd w1, cd w2);
// Normalized distance between the engine bracket and [P/(w1-w2), L1 (x) L2].
double bracket_check_quadratic(const RationalMultiplicative& m, cd w1, cd w2);

LeafInvariants leaf_invariants(const RationalAdditive& rep);
LeafInvariants leaf_invariants(const RationalMultiplicative& m);

// Largest normalized bracket of any orbit scalar with any entry of L(w). The entries are
// invariant under the rescaling a -> c a, b -> b / c generated by
// b^T a, so they are the functions the scalar must commute with.
double orbit_scalar_casimir_residual(const RationalAdditive& rep, cd w);
double orbit_scalar_casimir_residual(const RationalMultiplicative& m, cd w);

} // namespace laxkit
