#pragma once

#include <array>
#include <vector>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/poisson_engine.hpp"
#include "laxkit/sklyanin.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit {

// ---------------------------------------------------------------------------
// Degree-N chain in general position. Indices m are 0-based and cyclic:
// q[d] = q[0], f[-1] = f[d-1]. The framing vectors alpha_i are the standard basis.

struct TyurinChain {
    std::vector<std::vector<cd>> q; // d rows of N Tyurin points
    std::vector<std::vector<cd>> f; // d rows of N nonzero scales
    std::vector<cd> z;              // d main poles
    LatticeParams L;

    int N() const { return q.empty() ? 0 : static_cast<int>(q.front().size()); }
    int d() const { return static_cast<int>(q.size()); }
    const std::vector<cd>& q_at(int m) const { return q[((m % d()) + d()) % d()]; }
    const std::vector<cd>& f_at(int m) const { return f[((m % d()) + d()) % d()]; }
    // Shapes, f != 0, q gaps > 1e-8 within each row, z_m^- away from q_m and q_{m+1}.
    void validate() const;
};

// B_m^{ij}(z) = f_m^i s(z + q_{m+1}^i - q_m^j - z_m) s(z - q_{m+1}^i)
//             / (s(z - z_m) s(q_{m+1}^i - q_m^j) s(z - q_m^j)), s = Weierstrass sigma.
CMatrix chain_factor_general(const TyurinChain& ch, int m, cd z);
CMatrix chain_factor_general_inverse(const TyurinChain& ch, int m, cd z);

// z_m + sum_i (q_m^i - q_{m+1}^i).
cd zminus_general(const TyurinChain& ch, int m);

// res_{z_m} B_m = P Q^T and res_{z_m^-} B_m^{-1} = Pt Qt^T.
struct ResidueVectors {
    CVector P, Q, Pt, Qt;
};
ResidueVectors residue_vectors(const TyurinChain& ch, int m);

// Tangent layout: dq (m-major, d*N entries) followed by df (m-major, d*N entries).
// The leaf conditions dz_m^- = 0 read sum_i (dq_m^i - dq_{m+1}^i) = 0.
std::vector<CVector> general_leaf_constraints(const TyurinChain& ch);
CVector general_leaf_project(const TyurinChain& ch, const CVector& t);

// sum_{m,i} dln(f_{m-1}^i prod_{p != i} s(q_m^i - q_m^p) / prod_p s(q_m^i - q_{m+1}^p)) ^ dq_m^i.
cd omega2_general(const TyurinChain& ch, const CVector& t1, const CVector& t2);

// ---------------------------------------------------------------------------
// Multi-pole Sklyanin functions.

struct MultiPole {
    cd z;
    std::array<cd, 4> s; // (s~_j^0, s~_j^1, s~_j^2, s~_j^3)
};

struct MultiPoleSklyanin {
    cd s0;
    std::vector<MultiPole> poles;
    LatticeParams L;

    int d() const { return static_cast<int>(poles.size()); }
    // sum_j s~_j^0 = 0 within 1e-12 relative; distinct poles modulo the lattice.
    void validate() const;
};

CMatrix eval_multipole(const MultiPoleSklyanin& mp, cd z);

// Chain factor in hatted coordinates s^. The twist obeys u_{m+1} = u_m + 2 Delta_m; with
// this relation g_{m+1} B_m g_m^{-1} is elliptic on C / (Z + 2 tau Z).
struct ChainFactor {
    std::array<cd, 4> s_hat;
    cd z;
};

struct SklyaninChain {
    std::vector<ChainFactor> factors;
    std::vector<cd> u; // d + 1 values, u[d] = u[0] modulo 2 (Z + tau Z)
    LatticeParams L;

    int d() const { return static_cast<int>(factors.size()); }
    cd delta(int m) const { return 0.5 * (u[m + 1] - u[m]); }
    // Sizes and closure: (u[d] - u[0]) / 2 in the lattice within 1e-8.
    void validate() const;
};

// Coefficient matrices of s^0..s^3 in the hatted factor at spectral point z:
// theta11(z'+D)/theta11(z') I, theta01(D)/theta01 sigma_1 e^{pi i z'} phi(tau/2 + D, z') / (pi i),
// theta00(D)/theta00 sigma_2 e^{pi i z'} phi((1+tau)/2 + D, z') / (pi i),
// theta10(D)/theta10 sigma_3 phi(1/2 + D, z') / (pi i), with z' = z - z_m, D = Delta_m.
// Regular at D = 0, where it reduces to the single-pole basis at z'.
std::array<CMatrix, 4> hatted_basis(cd delta, cd zprime, const LatticeParams& L);
CMatrix chain_factor_hatted(const SklyaninChain& ch, int m, cd z);

// Raw coordinates from the rescaling identification:
// s^0 = s0^ / theta11'(0), s^k = theta_k(D) / (theta_k theta11(D)) s^k^.
std::array<cd, 4> raw_coordinates(const SklyaninChain& ch, int m);
// The displayed factor s^0 phi(D, z') I + ... in raw coordinates; equals the hatted factor divided
// by theta11(D). Throws DegenerateDelta when D or a half-period shift of it is a lattice point.
CMatrix chain_factor_sklyanin(const SklyaninChain& ch, int m, cd z);

// B_{d-1} ... B_0 in hatted form.
CMatrix chain_product(const SklyaninChain& ch, cd z);

struct ZeroPairing {
    // Empty: lexicographic order, alternate assignment (even positions give z_m^-).
    // Otherwise a permutation of 0..2d-1; factor m takes zeros perm[2m] and perm[2m+1].
    std::vector<int> perm;
};

struct FactorizationResult {
    SklyaninChain chain;
    std::vector<cd> det_zeros;  // lexicographically sorted zeros of det L in the cell
    std::vector<cd> z_minus;    // per factor
    std::vector<cd> z_tilde;    // per factor, after the closure shift
    cd closure_shift;           // lattice vector added to the last z~^-
    double kernel_condition;    // worst second-smallest / largest singular value of the kernel systems
};

// Zeros of det L on the Z + tau Z cell (2d of them), sorted lexicographically.
// Throws ZeroCountMismatch when the count differs from 2d.
std::vector<cd> multipole_det_zeros(const MultiPoleSklyanin& mp);

FactorizationResult factorize_multipole(const MultiPoleSklyanin& mp, cd u1,
                                        const ZeroPairing& pairing = {});

// max over points of max|L(z) - c prod(z)| / max|L(z)| with the best single scalar c.
double chain_reconstruction_error(const MultiPoleSklyanin& mp, const SklyaninChain& ch,
                                  const std::vector<cd>& points);

// Quadratic Sklyanin bracket on hatted coordinates of one factor (4 coordinates).
PoissonStructure hatted_structure(const LatticeParams& L);
// Direct sum over factors, acting on the concatenated s^ vectors.
PoissonStructure chain_structure(const SklyaninChain& ch);
CVector chain_coordinates(const SklyaninChain& ch);
MatrixFamily chain_factor_family(const SklyaninChain& ch, int m);
MatrixFamily chain_product_family(const SklyaninChain& ch);

struct ChainBracketReport {
    std::vector<Proportionality> per_factor;
    Proportionality product;
    double cross_residual; // max |{B_i (x) B_j}| over i != j
};
ChainBracketReport chain_bracket_check(const SklyaninChain& ch,
                                       const std::vector<std::pair<cd, cd>>& samples);

} // namespace laxkit
