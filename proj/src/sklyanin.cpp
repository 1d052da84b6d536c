#include "laxkit/sklyanin.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "laxkit/errors.hpp"

namespace laxkit {

namespace {

constexpr double kPoleGuard = 1e-10;

const CMatrix& sigma_mat(int a)
{
    static const std::array<CMatrix, 4> s{pauli(0), pauli(1), pauli(2), pauli(3)};
    return s[a];
}

CMatrix combine(const std::array<CMatrix, 4>& basis, const CVector& coeff, int offset)
{
    CMatrix M = CMatrix::Zero(2, 2);
    for (int a = 0; a < 4; ++a) {
        M += coeff(offset + a) * basis[a];
    }
    return M;
}

CVector as_vector(const std::array<cd, 4>& s)
{
    CVector v(4);
    v << s[0], s[1], s[2], s[3];
    return v;
}

void guard_spectral(cd w, const LatticeParams& L)
{
    if (L.lattice_distance(w) < kPoleGuard) {
        fail(ErrorKind::PoleHit, "spectral point on the pole lattice");
    }
}

double normalized(const CMatrix& A, const CMatrix& B)
{
    const double scale = std::max(A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
    return scale == 0.0 ? 0.0 : (A - B).cwiseAbs().maxCoeff() / scale;
}

cd sum_sq(const SklyaninCoords& c)
{
    return c.s[1] * c.s[1] + c.s[2] * c.s[2] + c.s[3] * c.s[3];
}

CVector unit5(int k)
{
    CVector e = CVector::Zero(5);
    e(k) = 1.0;
    return e;
}

cd apply(const CVector& g, const Tangent& t)
{
    return g.transpose() * t;
}

CMatrix matrix_power_signed(const CMatrix& M, int p)
{
    // M^p for p <= 1, with p = 0 the identity.
    if (p == 1) {
        return M;
    }
    CMatrix out = CMatrix::Identity(M.rows(), M.cols());
    if (p < 0) {
        const CMatrix inv = inverse(M);
        for (int i = 0; i < -p; ++i) {
            out = out * inv;
        }
    }
    return out;
}

} // namespace

CVector SklyaninCoords::x() const
{
    CVector v(5);
    v << u, s[0], s[1], s[2], s[3];
    return v;
}

SklyaninCoords SklyaninCoords::from_x(const CVector& x, const LatticeParams& L)
{
    if (x.size() != 5) {
        fail(ErrorKind::DimensionMismatch, "Sklyanin coordinate vector must have length 5");
    }
    return {x(0), {x(1), x(2), x(3), x(4)}, L};
}

QuarticConsts QuarticConsts::from(const LatticeParams& L)
{
    const auto& k = L.consts();
    return {std::pow(k.c00, 4), std::pow(k.c01, 4), std::pow(k.c10, 4)};
}

std::array<CMatrix, 4> lax_basis(cd z, const LatticeParams& L)
{
    const cd tau = L.tau();
    const cd e = std::exp(kI * kPi * z);
    const cd pii = kI * kPi;
    return {sigma_mat(0), sigma_mat(1) * (e * phi(0.5 * tau, z, L) / pii),
            sigma_mat(2) * (e * phi(0.5 * (1.0 + tau), z, L) / pii),
            sigma_mat(3) * (phi(0.5, z, L) / pii)};
}

std::array<CMatrix, 4> lax_basis_dz(cd z, const LatticeParams& L)
{
    const cd tau = L.tau();
    const cd e = std::exp(kI * kPi * z);
    const cd pii = kI * kPi;
    auto shifted = [&](cd w) { return e * (pii * phi(w, z, L) + phi_dz(w, z, L)) / pii; };
    return {CMatrix::Zero(2, 2), sigma_mat(1) * shifted(0.5 * tau),
            sigma_mat(2) * shifted(0.5 * (1.0 + tau)), sigma_mat(3) * (phi_dz(0.5, z, L) / pii)};
}

CMatrix lax_single(const SklyaninCoords& c, cd z)
{
    return combine(lax_basis(z, c.L), as_vector(c.s), 0);
}

CMatrix lax_single_dz(const SklyaninCoords& c, cd z)
{
    return combine(lax_basis_dz(z, c.L), as_vector(c.s), 0);
}

CMatrix lax_conjugated(const SklyaninCoords& c, cd z)
{
    const cd tau2 = 2.0 * c.L.tau();
    const cd g0 = theta_tau(Char::c00, z - c.u, tau2, c.L.trunc_tol());
    const cd g1 = theta_tau(Char::c10, z - c.u, tau2, c.L.trunc_tol());
    if (std::min(std::abs(g0), std::abs(g1)) < 1e-12 * std::max({std::abs(g0), std::abs(g1), 1.0})) {
        fail(ErrorKind::GaugeSingular, "gauge factor vanishes at z - u");
    }
    CMatrix M = lax_single(c, z);
    M(0, 1) *= g0 / g1;
    M(1, 0) *= g1 / g0;
    return M;
}

MatrixFamily sklyanin_family(const LatticeParams& L)
{
    MatrixFamily F;
    F.eval = [L](const CVector& x, cd z) { return combine(lax_basis(z, L), x, 1); };
    F.jac = [L](const CVector&, cd z) {
        const auto b = lax_basis(z, L);
        return std::vector<CMatrix>{CMatrix::Zero(2, 2), b[0], b[1], b[2], b[3]};
    };
    return F;
}

CMatrix elliptic_r(cd z, const LatticeParams& L)
{
    if (L.lattice_distance(z) < kPoleGuard) {
        fail(ErrorKind::PoleAtArgument, "elliptic r-matrix evaluated at a lattice point");
    }
    const auto& k = L.consts();
    const cd pref = -k.d11 / (2.0 * kPi * theta(Char::c11, z, L));
    return pref * (theta(Char::c01, z, L) / k.c01 * kron(sigma_mat(1), sigma_mat(1)) +
                   theta(Char::c00, z, L) / k.c00 * kron(sigma_mat(2), sigma_mat(2)) +
                   theta(Char::c10, z, L) / k.c10 * kron(sigma_mat(3), sigma_mat(3)));
}

PoissonStructure structure(int n, const LatticeParams& L)
{
    return structure(n, QuarticConsts::from(L));
}

PoissonStructure structure(int n, const QuarticConsts& k)
{
    if (n < 1 || n > 3) {
        fail(ErrorKind::InvariantViolation, "bracket order must be 1, 2 or 3");
    }
    PoissonStructure P;
    P.coord_names = {"u", "s0", "s1", "s2", "s3"};
    P.pi = [n, k](const CVector& x) {
        const cd s0 = x(1), s1 = x(2), s2 = x(3), s3 = x(4);
        const cd A = k.A, B = k.B, C = k.C;
        CMatrix m = CMatrix::Zero(5, 5);
        auto put = [&](int a, int b, cd v) {
            m(a, b) = v;
            m(b, a) = -v;
        };
        switch (n) {
        case 1:
            put(2, 3, -s3);
            put(2, 4, s2);
            put(3, 4, -s1);
            put(0, 1, 1.0);
            break;
        case 2:
            put(1, 2, -B * s2 * s3);
            put(1, 3, A * s1 * s3);
            put(1, 4, -C * s1 * s2);
            put(2, 3, -s0 * s3);
            put(2, 4, s0 * s2);
            put(3, 4, -s0 * s1);
            for (int j = 1; j < 5; ++j) {
                put(0, j, x(j));
            }
            break;
        default:
            put(1, 2, -2.0 * B * s0 * s2 * s3);
            put(1, 3, 2.0 * A * s0 * s1 * s3);
            put(1, 4, -2.0 * C * s0 * s1 * s2);
            put(2, 3, s3 * (s1 * s1 * A + s2 * s2 * B - s0 * s0));
            put(2, 4, s2 * (s0 * s0 - s1 * s1 * C + s3 * s3 * B));
            put(3, 4, -s1 * (s0 * s0 + s2 * s2 * C + s3 * s3 * A));
            break;
        }
        return m;
    };
    return P;
}

cd det_value(const SklyaninCoords& c, cd z)
{
    if (c.L.lattice_distance(z) < kPoleGuard) {
        fail(ErrorKind::PoleAtArgument, "det formula evaluated at a lattice point");
    }
    const auto q = QuarticConsts::from(c.L);
    const auto& k = c.L.consts();
    const cd ratio = theta(Char::c10, z, c.L) / theta(Char::c11, z, c.L);
    return c.s[0] * c.s[0] + c.s[1] * c.s[1] * q.A + c.s[2] * c.s[2] * q.B +
           ratio * ratio * k.c00 * k.c00 * k.c01 * k.c01 * sum_sq(c);
}

double det_residual(const SklyaninCoords& c, cd z)
{
    const cd formula = det_value(c, z);
    const cd direct = det(lax_single(c, z));
    const auto q = QuarticConsts::from(c.L);
    const double scale = std::max({std::abs(direct), std::abs(c.s[0] * c.s[0]),
                                   std::abs(c.s[1] * c.s[1] * q.A), std::abs(c.s[2] * c.s[2] * q.B),
                                   std::abs(formula - c.s[0] * c.s[0] - c.s[1] * c.s[1] * q.A -
                                            c.s[2] * c.s[2] * q.B)});
    return scale == 0.0 ? 0.0 : std::abs(formula - direct) / scale;
}

std::vector<cd> det_zeros(const SklyaninCoords& c)
{
    const LatticeParams& L = c.L;
    const double h = 1e-3;
    const double scale = std::abs(c.s[0] * c.s[0]) + std::abs(c.s[1] * c.s[1]) + std::abs(c.s[2] * c.s[2]) +
                         std::abs(c.s[3] * c.s[3]);
    if (std::abs(h * h * det(lax_single(c, h))) <= 1e-10 * scale) {
        fail(ErrorKind::DegenerateDeterminant, "det L has no pole at 0 and is constant");
    }
    const TorusDomain D(1.0, L.tau(), cd(-0.1193, 0.0) - 0.0917 * L.tau());
    TorusRootOptions opts;
    opts.poles = {{0.0, 2}};
    opts.expected_count = 2;
    return torus_roots_detailed([&](cd z) { return det(lax_single(c, z)); }, D, opts).roots;
}

double recursion_residual(int which, const SklyaninCoords& c, cd w1, cd w2)
{
    if (which != 2 && which != 3) {
        fail(ErrorKind::InvariantViolation, "recursion is defined for n = 2 and n = 3");
    }
    guard_spectral(w1, c.L);
    guard_spectral(w2, c.L);
    const MatrixFamily F = sklyanin_family(c.L);
    const CVector x = c.x();
    const CMatrix lhs = tensor_bracket(structure(which, c.L), F, x, w1, w2);
    const CMatrix prev = tensor_bracket(structure(which - 1, c.L), F, x, w1, w2);
    const CMatrix I = CMatrix::Identity(2, 2);
    const CMatrix X = kron(lax_single(c, w1), I) + kron(I, lax_single(c, w2)) -
                      c.s[0] * CMatrix::Identity(4, 4);
    return normalized(lhs, 0.5 * anticommutator(prev, X));
}

Proportionality fit_ratio(const std::vector<std::pair<CMatrix, CMatrix>>& pairs)
{
    std::vector<std::pair<cd, cd>> entries;
    for (const auto& [M, R] : pairs) {
        const double rmax = R.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < R.size(); ++i) {
            if (rmax > 0.0 && std::abs(R(i)) > 1e-8 * rmax) {
                entries.emplace_back(M(i), R(i));
            }
        }
    }
    if (entries.empty()) {
        fail(ErrorKind::AllEntriesZero, "r-matrix side vanishes at every sample");
    }
    cd num = 0.0;
    double den = 0.0;
    for (const auto& [m, r] : entries) {
        num += std::conj(r) * m;
        den += std::norm(r);
    }
    Proportionality out{num / den, 0.0};
    const double cabs = std::abs(out.constant);
    if (cabs == 0.0) {
        out.spread = std::numeric_limits<double>::infinity();
        return out;
    }
    for (const auto& [m, r] : entries) {
        out.spread = std::max(out.spread, std::abs(m / r - out.constant) / cabs);
    }
    return out;
}

Proportionality rmatrix_proportionality(const SklyaninCoords& c,
                                        const std::vector<std::pair<cd, cd>>& samples, int n)
{
    const MatrixFamily F = sklyanin_family(c.L);
    const PoissonStructure P = structure(n, c.L);
    const CVector x = c.x();
    std::vector<std::pair<CMatrix, CMatrix>> pairs;
    for (const auto& [w1, w2] : samples) {
        guard_spectral(w1, c.L);
        guard_spectral(w2, c.L);
        guard_spectral(w1 - w2, c.L);
        pairs.emplace_back(tensor_bracket(P, F, x, w1, w2),
                           commutator(elliptic_r(w1 - w2, c.L),
                                      kron(lax_single(c, w1), lax_single(c, w2))));
    }
    return fit_ratio(pairs);
}

std::vector<cd> l12_roots(const SklyaninCoords& c)
{
    const double smax = std::max({std::abs(c.s[0]), std::abs(c.s[1]), std::abs(c.s[2]),
                                  std::abs(c.s[3])});
    if (std::max(std::abs(c.s[1]), std::abs(c.s[2])) <= 1e-14 * smax) {
        fail(ErrorKind::RootCountUnexpected, "L12 vanishes identically (s1 = s2 = 0)");
    }
    const cd tau = c.L.tau();
    const cd pii = kI * kPi;
    auto f = [&](cd z) {
        const cd e = std::exp(pii * z);
        return (c.s[1] * e * phi(0.5 * tau, z, c.L) - kI * c.s[2] * e * phi(0.5 * (1.0 + tau), z, c.L)) / pii;
    };
    auto df = [&](cd z) {
        const cd e = std::exp(pii * z);
        auto d = [&](cd w) { return e * (pii * phi(w, z, c.L) + phi_dz(w, z, c.L)); };
        return (c.s[1] * d(0.5 * tau) - kI * c.s[2] * d(0.5 * (1.0 + tau))) / pii;
    };
    // Cell of Z + 2 tau Z; the origin keeps the poles 0 and tau off the edges.
    TorusDomain D(1.0, 2.0 * tau, cd(-0.2317, 0.0) - 0.1713 * (2.0 * tau));
    TorusRootOptions opts;
    opts.poles = {{0.0, 1}, {tau, 1}};
    opts.df = df;
    TorusRootResult res;
    try {
        res = torus_roots_detailed(f, D, opts);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::CountMismatch) {
            fail(ErrorKind::RootCountUnexpected, e.what());
        }
        throw;
    }
    if (res.roots.size() != 2) {
        fail(ErrorKind::RootCountUnexpected,
             "L12 has " + std::to_string(res.roots.size()) + " zeros per cell, expected 2");
    }
    return res.roots;
}

std::vector<SpectralSample> spectral_samples(const SklyaninCoords& c)
{
    const auto roots = l12_roots(c);
    const cd tau = c.L.tau();
    const cd zt = roots[0];
    const cd z2 = 1.0 + 2.0 * tau - zt;
    std::vector<SpectralSample> out{{zt, lax_single(c, zt)(1, 1), 0},
                                    {z2, lax_single(c, z2)(1, 1), 1}};
    const cd zb = c.u + tau + 0.5;
    const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<CMatrix>(lax_single(c, zb), false).eigenvalues();
    out.push_back({zb, ev(0), 2});
    out.push_back({zb, ev(1), 3});
    return out;
}

std::vector<CVector> leaf_constraints(int n, const SklyaninCoords& c)
{
    if (n < 1) {
        fail(ErrorKind::InvariantViolation, "bracket order must be positive");
    }
    const auto q = QuarticConsts::from(c.L);
    const cd s0 = c.s[0], s1 = c.s[1], s2 = c.s[2], s3 = c.s[3];
    const cd S = sum_sq(c);
    CVector dS = CVector::Zero(5);
    dS << 0.0, 0.0, 2.0 * s1, 2.0 * s2, 2.0 * s3;
    auto dC2 = [&]() {
        if (std::abs(S) == 0.0) {
            fail(ErrorKind::DegenerateConstraints, "s1^2 + s2^2 + s3^2 vanishes");
        }
        const cd C2 = (s0 * s0 + s1 * s1 * q.A + s2 * s2 * q.B) / S;
        CVector g(5);
        g << 0.0, 2.0 * s0 / S, 2.0 * s1 * (q.A - C2) / S, 2.0 * s2 * (q.B - C2) / S,
            -2.0 * s3 * C2 / S;
        return g;
    };
    auto dRatio = [&]() {
        if (std::abs(s0) == 0.0) {
            fail(ErrorKind::DegenerateConstraints, "s0 vanishes");
        }
        CVector g(5);
        g << 0.0, -S / (s0 * s0), 2.0 * s1 / s0, 2.0 * s2 / s0, 2.0 * s3 / s0;
        return g;
    };
    switch (n) {
    case 1: return {unit5(0), unit5(1), dS};
    case 2: return {dC2()};
    case 3: return {unit5(0), dC2(), dRatio()};
    default: return {unit5(0), unit5(1), dS, dC2()};
    }
}

Tangent leaf_project(int n, const SklyaninCoords& c, const Tangent& t)
{
    if (t.size() != 5) {
        fail(ErrorKind::DimensionMismatch, "tangent must have 5 components");
    }
    const auto rows = leaf_constraints(n, c);
    CMatrix G(rows.size(), 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        G.row(i) = rows[i].transpose();
    }
    const Eigen::VectorXd sv = singular_values(G);
    if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) {
        fail(ErrorKind::DegenerateConstraints, "leaf constraint differentials are dependent");
    }
    const CMatrix Gh = G.adjoint();
    const CVector y = (G * Gh).partialPivLu().solve(G * t);
    return t - Gh * y;
}

cd kp_form(int n, const SklyaninCoords& c, const Tangent& t1, const Tangent& t2)
{
    if (t1.size() != 5 || t2.size() != 5) {
        fail(ErrorKind::DimensionMismatch, "tangent must have 5 components");
    }
    for (const CVector& g : leaf_constraints(n, c)) {
        for (const Tangent* t : {&t1, &t2}) {
            if (std::abs(apply(g, *t)) > 1e-10 * g.norm() * std::max(1.0, t->norm())) {
                fail(ErrorKind::NotOnLeaf, "tangent violates a leaf constraint");
            }
        }
    }
    const LatticeParams& L = c.L;
    const cd tau = L.tau();
    const cd zt = l12_roots(c)[0];
    const cd z2 = 1.0 + 2.0 * tau - zt;
    const cd zb = c.u + tau + 0.5;

    const CMatrix Lz_t = lax_single_dz(c, zt);
    if (std::abs(Lz_t(0, 1)) < 1e-10) {
        fail(ErrorKind::DegenerateRoot, "L12 has a multiple zero");
    }
    const auto basis_t = lax_basis(zt, L);
    const auto basis_2 = lax_basis(z2, L);
    const auto basis_b = lax_basis(zb, L);
    const CMatrix Lz_2 = lax_single_dz(c, z2);
    const CMatrix Lz_b = lax_single_dz(c, zb);
    const cd k1 = lax_single(c, zt)(1, 1);
    const cd k2 = lax_single(c, z2)(1, 1);
    const CMatrix Lb = lax_single(c, zb);
    if ((n >= 2) && (std::abs(k1) == 0.0 || std::abs(k2) == 0.0)) {
        fail(ErrorKind::DegenerateRoot, "eigenvalue vanishes at a pole of the eigenvector");
    }
    const CMatrix W = matrix_power_signed(Lb, 1 - n);
    const cd w1 = std::pow(k1, 1 - n);
    const cd w2 = std::pow(k2, 1 - n);

    struct Pieces {
        cd dz, f1, f2, h, du;
    };
    auto pieces = [&](const Tangent& t) {
        Pieces p;
        const CMatrix dLt = combine(basis_t, t, 1);
        p.dz = -dLt(0, 1) / Lz_t(0, 1);
        p.f1 = w1 * (dLt(1, 1) + Lz_t(1, 1) * p.dz);
        p.f2 = w2 * (combine(basis_2, t, 1)(1, 1) - Lz_2(1, 1) * p.dz);
        // The point u + tau + 1/2 moves with u.
        p.h = (W * (combine(basis_b, t, 1) + Lz_b * t(0))).trace();
        p.du = t(0);
        return p;
    };
    const Pieces a = pieces(t1);
    const Pieces b = pieces(t2);
    auto wedge = [](cd f1, cd g1, cd f2, cd g2) { return f1 * g2 - f2 * g1; };
    return wedge(a.f1, a.dz, b.f1, b.dz) - wedge(a.f2, a.dz, b.f2, b.dz) + wedge(a.h, a.du, b.h, b.du);
}

cd kp_closed_form(const SklyaninCoords& c, const Tangent& t1, const Tangent& t2, double coeff)
{
    const cd s0 = c.s[0], s1 = c.s[1], s2 = c.s[2], s3 = c.s[3];
    const cd S = sum_sq(c);
    if (std::abs(S) == 0.0 || std::abs(s0) == 0.0) {
        fail(ErrorKind::DegenerateConstraints, "closed form needs s0 != 0 and S != 0");
    }
    // Tangent index of s_i is i + 1.
    auto w = [&](int i, int j) { return t1(i + 1) * t2(j + 1) - t1(j + 1) * t2(i + 1); };
    auto dS = [&](const Tangent& t) { return 2.0 * (s1 * t(2) + s2 * t(3) + s3 * t(4)); };
    return coeff * (s1 * w(2, 3) - s2 * w(1, 3) + s3 * w(1, 2)) / (s0 * S) +
           (dS(t1) * t2(0) - dS(t2) * t1(0)) / S;
}

} // namespace laxkit
