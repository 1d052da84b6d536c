#include "laxkit/elliptic_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "laxkit/errors.hpp"

namespace laxkit {

namespace {

constexpr double kPoleGuard = 1e-10;
constexpr double kGap = 1e-8;

std::string at(const char* field, int m, int i = -1)
{
    std::string s = std::string(field) + "[" + std::to_string(m) + "]";
    return i < 0 ? s : s + "[" + std::to_string(i) + "]";
}

void guard_point(cd w, const LatticeParams& L, const char* what)
{
    if (L.lattice_distance(w) < kPoleGuard) {
        fail(ErrorKind::PoleAtArgument, std::string("evaluation at a pole: ") + what);
    }
}

// Orthogonal projector onto {t : G t = 0} for a possibly rank-deficient G.
CMatrix kernel_projector(const CMatrix& G)
{
    const Eigen::JacobiSVD<CMatrix> svd(G, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    CMatrix P = CMatrix::Identity(G.cols(), G.cols());
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > 1e-12 * s(0)) {
            const CVector v = svd.matrixV().col(k);
            P -= v * v.adjoint();
        }
    }
    return P;
}

CMatrix stack_rows(const std::vector<CVector>& rows, Eigen::Index cols)
{
    CMatrix G(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        G.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return G;
}

CMatrix combine(const std::array<CMatrix, 4>& basis, const std::array<cd, 4>& s)
{
    CMatrix M = CMatrix::Zero(2, 2);
    for (int a = 0; a < 4; ++a) {
        M += s[a] * basis[a];
    }
    return M;
}

} // namespace

// ---------------------------------------------------------------------------
// General position

void TyurinChain::validate() const
{
    const int dd = d();
    const int n = N();
    if (dd == 0 || n == 0) {
        fail(ErrorKind::InvariantViolation, "q: chain needs d >= 1 and N >= 1");
    }
    if (static_cast<int>(f.size()) != dd || static_cast<int>(z.size()) != dd) {
        fail(ErrorKind::InvariantViolation, "f/z: row count differs from q");
    }
    for (int m = 0; m < dd; ++m) {
        if (static_cast<int>(q[m].size()) != n || static_cast<int>(f[m].size()) != n) {
            fail(ErrorKind::InvariantViolation, at("q", m) + ": row length differs from N");
        }
        for (int i = 0; i < n; ++i) {
            if (f[m][i] == 0.0) {
                fail(ErrorKind::InvariantViolation, at("f", m, i) + ": scale is zero");
            }
            for (int j = i + 1; j < n; ++j) {
                if (L.lattice_distance(q[m][i] - q[m][j]) < kGap) {
                    fail(ErrorKind::InvariantViolation, at("q", m, j) + ": coincides with another point");
                }
            }
            for (int j = 0; j < n; ++j) {
                if (L.lattice_distance(q_at(m + 1)[i] - q[m][j]) < kGap) {
                    fail(ErrorKind::InvariantViolation,
                         at("q", (m + 1) % dd, i) + ": coincides with a point of the previous row");
                }
            }
        }
        const cd zm = zminus_general(*this, m);
        for (int i = 0; i < n; ++i) {
            if (L.lattice_distance(zm - q[m][i]) < kGap || L.lattice_distance(zm - q_at(m + 1)[i]) < kGap) {
                fail(ErrorKind::InvariantViolation, at("z", m) + ": z^- meets a Tyurin point");
            }
        }
    }
}

cd zminus_general(const TyurinChain& ch, int m)
{
    cd out = ch.z[m];
    const auto& a = ch.q_at(m);
    const auto& b = ch.q_at(m + 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out += a[i] - b[i];
    }
    return out;
}

CMatrix chain_factor_general(const TyurinChain& ch, int m, cd z)
{
    const LatticeParams& L = ch.L;
    const auto& a = ch.q_at(m);
    const auto& b = ch.q_at(m + 1);
    const int n = ch.N();
    guard_point(z - ch.z[m], L, "z_m");
    for (int j = 0; j < n; ++j) {
        guard_point(z - a[j], L, "q_m");
    }
    const cd s_zm = sigma(z - ch.z[m], L);
    CMatrix B(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            B(i, j) = ch.f_at(m)[i] * sigma(z + b[i] - a[j] - ch.z[m], L) * sigma(z - b[i], L) /
                      (s_zm * sigma(b[i] - a[j], L) * sigma(z - a[j], L));
        }
    }
    return B;
}

CMatrix chain_factor_general_inverse(const TyurinChain& ch, int m, cd z)
{
    const LatticeParams& L = ch.L;
    const auto& a = ch.q_at(m);
    const auto& b = ch.q_at(m + 1);
    const int n = ch.N();
    const cd zmn = zminus_general(ch, m);
    guard_point(z - zmn, L, "z_m^-");
    for (int l = 0; l < n; ++l) {
        guard_point(z - b[l], L, "q_{m+1}");
    }
    CMatrix Bi(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            cd num = 1.0, den = 1.0;
            for (int p = 0; p < n; ++p) {
                num *= sigma(b[l] - a[p], L);
                if (p != l) {
                    num *= sigma(a[k] - b[p], L);
                    den *= sigma(b[l] - b[p], L);
                }
                if (p != k) {
                    den *= sigma(a[k] - a[p], L);
                }
            }
            Bi(k, l) = sigma(z - zmn + a[k] - b[l], L) * sigma(z - a[k], L) /
                       (ch.f_at(m)[l] * sigma(z - zmn, L) * sigma(z - b[l], L)) * num / den;
        }
    }
    return Bi;
}

ResidueVectors residue_vectors(const TyurinChain& ch, int m)
{
    const LatticeParams& L = ch.L;
    const auto& a = ch.q_at(m);
    const auto& b = ch.q_at(m + 1);
    const auto& f = ch.f_at(m);
    const int n = ch.N();
    const cd zm = ch.z[m];
    const cd zmn = zminus_general(ch, m);
    ResidueVectors r{CVector(n), CVector(n), CVector(n), CVector(n)};
    for (int i = 0; i < n; ++i) {
        r.P(i) = f[i] * sigma(zm - b[i], L);
        r.Q(i) = 1.0 / sigma(zm - a[i], L);
        cd num_k = 1.0, den_k = 1.0, num_l = 1.0, den_l = 1.0;
        for (int p = 0; p < n; ++p) {
            num_k *= sigma(a[i] - b[p], L);
            num_l *= sigma(b[i] - a[p], L);
            if (p != i) {
                den_k *= sigma(a[i] - a[p], L);
                den_l *= sigma(b[i] - b[p], L);
            }
        }
        r.Pt(i) = sigma(zmn - a[i], L) * num_k / den_k;
        r.Qt(i) = num_l / (f[i] * sigma(zmn - b[i], L) * den_l);
    }
    return r;
}

std::vector<CVector> general_leaf_constraints(const TyurinChain& ch)
{
    const int d = ch.d();
    const int n = ch.N();
    std::vector<CVector> rows;
    for (int m = 0; m < d; ++m) {
        CVector g = CVector::Zero(2 * d * n);
        for (int i = 0; i < n; ++i) {
            g(m * n + i) += 1.0;
            g(((m + 1) % d) * n + i) -= 1.0;
        }
        rows.push_back(g);
    }
    return rows;
}

CVector general_leaf_project(const TyurinChain& ch, const CVector& t)
{
    const Eigen::Index dim = 2 * ch.d() * ch.N();
    if (t.size() != dim) {
        fail(ErrorKind::DimensionMismatch, "tangent length must be 2 d N");
    }
    return kernel_projector(stack_rows(general_leaf_constraints(ch), dim)) * t;
}

cd omega2_general(const TyurinChain& ch, const CVector& t1, const CVector& t2)
{
    const int d = ch.d();
    const int n = ch.N();
    const Eigen::Index dim = 2 * d * n;
    if (t1.size() != dim || t2.size() != dim) {
        fail(ErrorKind::DimensionMismatch, "tangent length must be 2 d N");
    }
    for (const CVector& g : general_leaf_constraints(ch)) {
        for (const CVector* t : {&t1, &t2}) {
            if (std::abs(g.cwiseProduct(*t).sum()) > 1e-10 * std::max(1.0, t->norm())) {
                fail(ErrorKind::NotOnLeaf, "tangent moves some z_m^-");
            }
        }
    }
    const LatticeParams& L = ch.L;
    auto dq = [n](const CVector& t, int m, int i) { return t(m * n + i); };
    auto df = [n, d](const CVector& t, int m, int i) { return t(d * n + m * n + i); };
    cd total = 0.0;
    for (int m = 0; m < d; ++m) {
        const int prev = (m + d - 1) % d;
        const int next = (m + 1) % d;
        const auto& a = ch.q[m];
        const auto& b = ch.q[next];
        for (int i = 0; i < n; ++i) {
            auto dlog = [&](const CVector& t) {
                cd v = df(t, prev, i) / ch.f[prev][i];
                for (int p = 0; p < n; ++p) {
                    if (p != i) {
                        v += weierstrass_zeta(a[i] - a[p], L) * (dq(t, m, i) - dq(t, m, p));
                    }
                    v -= weierstrass_zeta(a[i] - b[p], L) * (dq(t, m, i) - dq(t, next, p));
                }
                return v;
            };
            total += dlog(t1) * dq(t2, m, i) - dlog(t2) * dq(t1, m, i);
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Multi-pole Sklyanin

void MultiPoleSklyanin::validate() const
{
    cd sum = 0.0;
    double scale = 0.0;
    for (int j = 0; j < d(); ++j) {
        sum += poles[j].s[0];
        scale += std::abs(poles[j].s[0]);
        for (int k = j + 1; k < d(); ++k) {
            if (L.lattice_distance(poles[j].z - poles[k].z) < kGap) {
                fail(ErrorKind::InvariantViolation, at("poles", k) + ".z: coincides with another pole");
            }
        }
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
        fail(ErrorKind::InvariantViolation, "poles[*].s[0]: residue traces do not sum to zero");
    }
}

CMatrix eval_multipole(const MultiPoleSklyanin& mp, cd z)
{
    CMatrix M = mp.s0 * CMatrix::Identity(2, 2);
    for (const MultiPole& p : mp.poles) {
        const cd zp = z - p.z;
        guard_point(zp, mp.L, "multi-pole z_j");
        const auto basis = lax_basis(zp, mp.L);
        M += p.s[0] * e1(zp, mp.L) * CMatrix::Identity(2, 2);
        for (int a = 1; a < 4; ++a) {
            M += p.s[a] * basis[a];
        }
    }
    return M;
}

void SklyaninChain::validate() const
{
    if (static_cast<int>(u.size()) != d() + 1) {
        fail(ErrorKind::InvariantViolation, "u: expected d + 1 entries");
    }
    const cd total = 0.5 * (u[d()] - u[0]);
    if (L.lattice_distance(total) > 1e-8) {
        fail(ErrorKind::InvariantViolation, "u: sum of Delta_m is not a lattice point");
    }
}

std::array<CMatrix, 4> hatted_basis(cd delta, cd zprime, const LatticeParams& L)
{
    const cd tau = L.tau();
    guard_point(zprime, L, "chain factor z_m");
    for (const cd w : {0.5 * tau, 0.5 * (1.0 + tau), cd(0.5)}) {
        if (L.lattice_distance(w + delta) < kPoleGuard) {
            fail(ErrorKind::DegenerateDelta, "Delta_m sits at a half period");
        }
    }
    const auto& k = L.consts();
    const cd e = std::exp(kI * kPi * zprime);
    const cd pii = kI * kPi;
    return {pauli(0) * (theta(Char::c11, zprime + delta, L) / theta(Char::c11, zprime, L)),
            pauli(1) * (theta(Char::c01, delta, L) / k.c01 * e * phi(0.5 * tau + delta, zprime, L) / pii),
            pauli(2) * (theta(Char::c00, delta, L) / k.c00 * e * phi(0.5 * (1.0 + tau) + delta, zprime, L) / pii),
            pauli(3) * (theta(Char::c10, delta, L) / k.c10 * phi(0.5 + delta, zprime, L) / pii)};
}

CMatrix chain_factor_hatted(const SklyaninChain& ch, int m, cd z)
{
    const ChainFactor& f = ch.factors[m];
    return combine(hatted_basis(ch.delta(m), z - f.z, ch.L), f.s_hat);
}

std::array<cd, 4> raw_coordinates(const SklyaninChain& ch, int m)
{
    const LatticeParams& L = ch.L;
    const cd D = ch.delta(m);
    if (L.lattice_distance(D) < kPoleGuard) {
        fail(ErrorKind::DegenerateDelta, "theta_11(Delta_m) vanishes");
    }
    const auto& k = L.consts();
    const auto& s = ch.factors[m].s_hat;
    const cd t11 = theta(Char::c11, D, L);
    return {s[0] / k.d11, theta(Char::c01, D, L) / (k.c01 * t11) * s[1],
            theta(Char::c00, D, L) / (k.c00 * t11) * s[2], theta(Char::c10, D, L) / (k.c10 * t11) * s[3]};
}

CMatrix chain_factor_sklyanin(const SklyaninChain& ch, int m, cd z)
{
    const LatticeParams& L = ch.L;
    const auto s = raw_coordinates(ch, m);
    const cd D = ch.delta(m);
    const cd zp = z - ch.factors[m].z;
    guard_point(zp, L, "chain factor z_m");
    const cd tau = L.tau();
    const cd pii = kI * kPi;
    const cd e = std::exp(pii * zp);
    return s[0] * phi(D, zp, L) * pauli(0) + s[1] / pii * pauli(1) * (e * phi(0.5 * tau + D, zp, L)) +
           s[2] / pii * pauli(2) * (e * phi(0.5 * (1.0 + tau) + D, zp, L)) +
           s[3] / pii * pauli(3) * phi(0.5 + D, zp, L);
}

CMatrix chain_product(const SklyaninChain& ch, cd z)
{
    CMatrix M = CMatrix::Identity(2, 2);
    for (int m = 0; m < ch.d(); ++m) {
        M = chain_factor_hatted(ch, m, z) * M;
    }
    return M;
}

namespace {

// Deterministic points spread over the cell, away from the given centers.
std::vector<cd> spread_points(const LatticeParams& L, const std::vector<cd>& avoid, int count)
{
    std::vector<cd> out;
    for (int k = 0; static_cast<int>(out.size()) < count && k < 100 * count; ++k) {
        const double a = std::fmod(0.1234 + 0.6180339887 * k, 1.0);
        const double b = std::fmod(0.3771 + 0.4142135624 * k, 1.0);
        const cd z = a + b * L.tau();
        bool ok = true;
        for (const cd c : avoid) {
            ok = ok && L.lattice_distance(z - c) > 0.05;
        }
        if (ok) {
            out.push_back(z);
        }
    }
    return out;
}

cd best_scalar(const std::vector<CMatrix>& target, const std::vector<CMatrix>& approx)
{
    cd num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        num += (approx[k].conjugate().cwiseProduct(target[k])).sum();
        den += approx[k].squaredNorm();
    }
    if (den == 0.0) {
        fail(ErrorKind::KernelSolveSingular, "chain product vanishes at every sample point");
    }
    return num / den;
}

} // namespace

std::vector<cd> multipole_det_zeros(const MultiPoleSklyanin& mp)
{
    mp.validate();
    const int d = mp.d();
    if (d == 0) {
        fail(ErrorKind::InvariantViolation, "poles: at least one pole is required");
    }
    const LatticeParams& L = mp.L;
    // det L is elliptic on Z + tau Z with a double pole at each z_j.
    TorusDomain D(1.0, L.tau(), cd(-0.1093, 0.0) - 0.0871 * L.tau());
    TorusRootOptions opts;
    for (const MultiPole& p : mp.poles) {
        opts.poles.push_back({p.z, 2});
    }
    TorusRootResult res;
    try {
        res = torus_roots_detailed([&](cd z) { return det(eval_multipole(mp, z)); }, D, opts);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::CountMismatch) {
            fail(ErrorKind::ZeroCountMismatch, e.what());
        }
        throw;
    }
    if (static_cast<int>(res.roots.size()) != 2 * d) {
        fail(ErrorKind::ZeroCountMismatch, "det L has " + std::to_string(res.roots.size()) +
                                               " zeros per cell, expected " + std::to_string(2 * d));
    }
    return res.roots;
}

FactorizationResult factorize_multipole(const MultiPoleSklyanin& mp, cd u1, const ZeroPairing& pairing)
{
    const std::vector<cd> zeros = multipole_det_zeros(mp);
    const int d = mp.d();
    const LatticeParams& L = mp.L;
    auto Lf = [&](cd z) { return eval_multipole(mp, z); };

    std::vector<int> perm = pairing.perm;
    if (perm.empty()) {
        perm.resize(2 * d);
        std::iota(perm.begin(), perm.end(), 0);
    } else {
        std::vector<int> sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k < 2 * d; ++k) {
            if (static_cast<int>(sorted.size()) != 2 * d || sorted[k] != k) {
                fail(ErrorKind::InvariantViolation, "pairing: not a permutation of the 2d zeros");
            }
        }
    }

    FactorizationResult out{{{}, {u1}, L}, zeros, {}, {}, 0.0, 1.0};
    cd total = 0.0;
    for (int m = 0; m < d; ++m) {
        out.z_minus.push_back(zeros[perm[2 * m]]);
        out.z_tilde.push_back(zeros[perm[2 * m + 1]]);
        total += 2.0 * mp.poles[m].z - out.z_minus[m] - out.z_tilde[m];
    }
    out.closure_shift = L.nearest_lattice_point(total);
    if (std::abs(total - out.closure_shift) > 1e-8) {
        fail(ErrorKind::PairingClosureFailure, "2 sum z_m - sum of zeros is not a lattice point");
    }
    out.z_tilde.back() += out.closure_shift;

    std::vector<cd> deltas(d);
    for (int m = 0; m < d; ++m) {
        deltas[m] = 0.5 * (2.0 * mp.poles[m].z - out.z_minus[m] - out.z_tilde[m]);
        out.chain.u.push_back(out.chain.u.back() + 2.0 * deltas[m]);
    }

    SklyaninChain& ch = out.chain;
    auto partial = [&](cd z) {
        CMatrix G = CMatrix::Identity(2, 2);
        for (int k = 0; k < ch.d(); ++k) {
            G = chain_factor_hatted(ch, k, z) * G;
        }
        return G;
    };
    for (int m = 0; m < d; ++m) {
        auto current = [&](cd z) {
            const CMatrix G = partial(z);
            return CMatrix(G * Lf(z) * inverse(G));
        };
        CMatrix A(4, 4);
        int row = 0;
        for (const cd zk : {out.z_minus[m], out.z_tilde[m]}) {
            CVector k;
            try {
                k = kernel_vector(current(zk), 1e-7);
            } catch (const Error& e) {
                fail(ErrorKind::KernelSolveSingular, std::string("no kernel at a det zero: ") + e.what());
            }
            const auto basis = hatted_basis(deltas[m], zk - mp.poles[m].z, L);
            for (int a = 0; a < 4; ++a) {
                A.block(row, a, 2, 1) = basis[a] * k;
            }
            row += 2;
        }
        const Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        if (!(sv(3) < 1e-7 * sv(0)) || !(sv(2) > 1e-12 * sv(0))) {
            fail(ErrorKind::KernelSolveSingular, "kernel conditions do not fix the factor up to scale");
        }
        out.kernel_condition = std::min(out.kernel_condition, sv(2) / sv(0));
        const CVector s = svd.matrixV().col(3);
        ch.factors.push_back({{s(0), s(1), s(2), s(3)}, mp.poles[m].z});
    }

    std::vector<cd> avoid;
    for (const MultiPole& p : mp.poles) {
        avoid.push_back(p.z);
    }
    std::vector<CMatrix> target, approx;
    for (const cd z : spread_points(L, avoid, 8)) {
        target.push_back(Lf(z));
        approx.push_back(chain_product(ch, z));
    }
    const cd c = best_scalar(target, approx);
    for (cd& s : ch.factors[0].s_hat) {
        s *= c;
    }
    return out;
}

double chain_reconstruction_error(const MultiPoleSklyanin& mp, const SklyaninChain& ch,
                                  const std::vector<cd>& points)
{
    std::vector<CMatrix> target, approx;
    for (const cd z : points) {
        target.push_back(eval_multipole(mp, z));
        approx.push_back(chain_product(ch, z));
    }
    const cd c = best_scalar(target, approx);
    double worst = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        worst = std::max(worst, (target[k] - c * approx[k]).cwiseAbs().maxCoeff() /
                                    target[k].cwiseAbs().maxCoeff());
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Brackets

PoissonStructure hatted_structure(const LatticeParams& L)
{
    const PoissonStructure full = structure(2, L);
    PoissonStructure P;
    P.coord_names = {"s0", "s1", "s2", "s3"};
    P.pi = [full](const CVector& x) {
        CVector y(5);
        y << 0.0, x;
        return CMatrix(full.pi(y).block(1, 1, 4, 4));
    };
    return P;
}

PoissonStructure chain_structure(const SklyaninChain& ch)
{
    std::vector<PoissonStructure> parts(ch.d(), hatted_structure(ch.L));
    PoissonStructure P = direct_sum(parts);
    for (int m = 0; m < ch.d(); ++m) {
        for (int a = 0; a < 4; ++a) {
            P.coord_names[4 * m + a] = "s" + std::to_string(a) + "_" + std::to_string(m);
        }
    }
    return P;
}

CVector chain_coordinates(const SklyaninChain& ch)
{
    CVector x(4 * ch.d());
    for (int m = 0; m < ch.d(); ++m) {
        for (int a = 0; a < 4; ++a) {
            x(4 * m + a) = ch.factors[m].s_hat[a];
        }
    }
    return x;
}

namespace {

SklyaninChain with_coordinates(SklyaninChain ch, const CVector& x)
{
    if (x.size() != 4 * ch.d()) {
        fail(ErrorKind::DimensionMismatch, "chain coordinate vector must have 4 d entries");
    }
    for (int m = 0; m < ch.d(); ++m) {
        for (int a = 0; a < 4; ++a) {
            ch.factors[m].s_hat[a] = x(4 * m + a);
        }
    }
    return ch;
}

} // namespace

MatrixFamily chain_factor_family(const SklyaninChain& ch, int m)
{
    MatrixFamily F;
    F.eval = [ch, m](const CVector& x, cd z) { return chain_factor_hatted(with_coordinates(ch, x), m, z); };
    F.jac = [ch, m](const CVector&, cd z) {
        std::vector<CMatrix> J(4 * ch.d(), CMatrix::Zero(2, 2));
        const auto basis = hatted_basis(ch.delta(m), z - ch.factors[m].z, ch.L);
        for (int a = 0; a < 4; ++a) {
            J[4 * m + a] = basis[a];
        }
        return J;
    };
    return F;
}

MatrixFamily chain_product_family(const SklyaninChain& ch)
{
    MatrixFamily F;
    F.eval = [ch](const CVector& x, cd z) { return chain_product(with_coordinates(ch, x), z); };
    F.jac = [ch](const CVector& x, cd z) {
        const SklyaninChain c = with_coordinates(ch, x);
        const int d = c.d();
        std::vector<CMatrix> B(d);
        for (int m = 0; m < d; ++m) {
            B[m] = chain_factor_hatted(c, m, z);
        }
        std::vector<CMatrix> J;
        CMatrix right = CMatrix::Identity(2, 2);
        for (int m = 0; m < d; ++m) {
            CMatrix left = CMatrix::Identity(2, 2);
            for (int k = d - 1; k > m; --k) {
                left = left * B[k];
            }
            for (const CMatrix& b : hatted_basis(c.delta(m), z - c.factors[m].z, c.L)) {
                J.push_back(left * b * right);
            }
            right = B[m] * right;
        }
        return J;
    };
    return F;
}

ChainBracketReport chain_bracket_check(const SklyaninChain& ch,
                                       const std::vector<std::pair<cd, cd>>& samples)
{
    ch.validate();
    const LatticeParams& L = ch.L;
    const PoissonStructure P = chain_structure(ch);
    const CVector x = chain_coordinates(ch);
    const int d = ch.d();
    std::vector<MatrixFamily> fam;
    for (int m = 0; m < d; ++m) {
        fam.push_back(chain_factor_family(ch, m));
    }
    const MatrixFamily prod = chain_product_family(ch);
    const CMatrix pi = P.eval(x);

    std::vector<std::vector<std::pair<CMatrix, CMatrix>>> per(d);
    std::vector<std::pair<CMatrix, CMatrix>> whole;
    ChainBracketReport rep{{}, {}, 0.0};
    for (const auto& [w1, w2] : samples) {
        for (const cd w : {w1, w2}) {
            for (const ChainFactor& f : ch.factors) {
                if (L.lattice_distance(w - f.z) < kPoleGuard) {
                    fail(ErrorKind::PoleHit, "spectral point on a factor pole");
                }
            }
        }
        if (L.lattice_distance(w1 - w2) < kPoleGuard) {
            fail(ErrorKind::PoleHit, "w1 - w2 on the r-matrix pole lattice");
        }
        const CMatrix r = elliptic_r(w1 - w2, L);
        std::vector<std::vector<CMatrix>> J1(d), J2(d);
        for (int m = 0; m < d; ++m) {
            J1[m] = fam[m].jac(x, w1);
            J2[m] = fam[m].jac(x, w2);
        }
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const CMatrix M = tensor_bracket(pi, J1[i], J2[j]);
                if (i == j) {
                    const CMatrix B1 = fam[i].eval(x, w1);
                    const CMatrix B2 = fam[i].eval(x, w2);
                    per[i].emplace_back(M, commutator(r, kron(B1, B2)));
                } else {
                    rep.cross_residual = std::max(rep.cross_residual, M.cwiseAbs().maxCoeff());
                }
            }
        }
        const CMatrix M = tensor_bracket(pi, prod.jac(x, w1), prod.jac(x, w2));
        whole.emplace_back(M, commutator(r, kron(prod.eval(x, w1), prod.eval(x, w2))));
    }
    for (int m = 0; m < d; ++m) {
        rep.per_factor.push_back(fit_ratio(per[m]));
    }
    rep.product = fit_ratio(whole);
    return rep;
}

} // namespace laxkit
