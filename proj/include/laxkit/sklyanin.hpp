#pragma once

#include <array>
#include <utility>
#include <vector>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/poisson_engine.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit {

// Extended single-pole coordinates. Coordinate vector order is (u, s0, s1, s2, s3).
struct SklyaninCoords {
    cd u;
    std::array<cd, 4> s;
    LatticeParams L;

    CVector x() const;
    static SklyaninCoords from_x(const CVector& x, const LatticeParams& L);
};

// Tangent components (du, ds0, ds1, ds2, ds3).
using Tangent = CVector;

// Structure constants A = theta_00^4, B = theta_01^4, C = theta_10^4 at z = 0.
struct QuarticConsts {
    cd A, B, C;
    static QuarticConsts from(const LatticeParams& L);
};

// Matrix coefficients of s0..s3: sigma_0, (1/pi i) sigma_1 e^{pi i z} phi(tau/2, z),
// (1/pi i) sigma_2 e^{pi i z} phi((1+tau)/2, z), (1/pi i) sigma_3 phi(1/2, z).
std::array<CMatrix, 4> lax_basis(cd z, const LatticeParams& L);
std::array<CMatrix, 4> lax_basis_dz(cd z, const LatticeParams& L);

CMatrix lax_single(const SklyaninCoords& c, cd z);
CMatrix lax_single_dz(const SklyaninCoords& c, cd z);
// g L g^-1 with g = diag(theta_00(z - u | 2 tau), theta_10(z - u | 2 tau)).
CMatrix lax_conjugated(const SklyaninCoords& c, cd z);
// L as a function of the coordinate vector; the u-derivative vanishes.
MatrixFamily sklyanin_family(const LatticeParams& L);

CMatrix elliptic_r(cd z, const LatticeParams& L);

// n = 1, 2, 3 on (u, s0, s1, s2, s3). The n = 3 u-row is zero.
PoissonStructure structure(int n, const LatticeParams& L);
PoissonStructure structure(int n, const QuarticConsts& k);

cd det_value(const SklyaninCoords& c, cd z);
// |det_value - det L| / max(|det L|, largest term of the formula).
double det_residual(const SklyaninCoords& c, cd z);
// The two zeros of det L on the Z + tau Z cell (double pole at 0), sorted lexicographically.
// Throws DegenerateDeterminant when det L has no pole (then it is constant).
std::vector<cd> det_zeros(const SklyaninCoords& c);

// {L (x) L}_n against (1/2)[{L (x) L}_{n-1}, L(w1) (x) I + I (x) L(w2) - s0 I]_+.
double recursion_residual(int which, const SklyaninCoords& c, cd w1, cd w2);

struct Proportionality {
    cd constant;   // least-squares ratio of engine bracket to [r, L1 (x) L2]
    double spread; // max relative deviation of the entrywise ratio from the constant
};
// Least-squares ratio over entries where the reference side exceeds 1e-8 of its largest entry.
// Pairs are (engine bracket, r-matrix side). Throws AllEntriesZero if no entry qualifies.
Proportionality fit_ratio(const std::vector<std::pair<CMatrix, CMatrix>>& pairs);
Proportionality rmatrix_proportionality(const SklyaninCoords& c,
                                        const std::vector<std::pair<cd, cd>>& samples,
                                        int n = 2);

struct SpectralSample {
    cd z;
    cd k;
    // 0: z~ with L12(z~) = 0; 1: 1 + 2 tau - z~; 2, 3: both sheets over u + tau + 1/2.
    int side;
};
// Zeros of L12 on the C / (Z + 2 tau Z) cell, sorted lexicographically.
std::vector<cd> l12_roots(const SklyaninCoords& c);
std::vector<SpectralSample> spectral_samples(const SklyaninCoords& c);

// Differentials (gradients) of the leaf functions of bracket n. n >= 4 imposes the union.
std::vector<CVector> leaf_constraints(int n, const SklyaninCoords& c);
Tangent leaf_project(int n, const SklyaninCoords& c, const Tangent& t);

// sum over eigenvector poles of k^{1-n} dk ^ dz, evaluated on tangents.
cd kp_form(int n, const SklyaninCoords& c, const Tangent& t1, const Tangent& t2);

// Closed form for n = 2: coeff (s1 ds2^ds3 - s2 ds1^ds3 + s3 ds1^ds2) / (s0 S) + dln S ^ du,
// S = s1^2 + s2^2 + s3^2. The Lax normalization used here fixes coeff = -2/pi.
inline constexpr double kKpFirstTermCoeff = -2.0 / 3.14159265358979323846;
inline constexpr double kKpDisplayedCoeff = 2.0;
cd kp_closed_form(const SklyaninCoords& c, const Tangent& t1, const Tangent& t2,
                  double coeff = kKpFirstTermCoeff);

} // namespace laxkit
