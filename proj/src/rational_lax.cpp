#include "laxkit/rational_lax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "laxkit/errors.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit {

namespace {

constexpr double kPoleGuard = 1e-10;
constexpr double kMinGap = 1e-8;
constexpr double kZeroClusterGap = 1e-6;
constexpr double kKernelTol = 1e-7;

std::string at(const char* field, std::size_t i, const char* sub)
{
    return std::string(field) + "[" + std::to_string(i) + "]." + sub;
}

void validate_L0(const CMatrix& L0)
{
    if (L0.rows() == 0 || L0.rows() != L0.cols()) {
        fail(ErrorKind::InvariantViolation, "L0: must be a nonempty square matrix");
    }
    CMatrix off = L0;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > 0.0) {
        fail(ErrorKind::InvariantViolation, "L0: must be diagonal");
    }
}

void check_gaps(const std::vector<cd>& zs, const char* field, const char* sub)
{
    for (std::size_t i = 0; i < zs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(zs[i] - zs[j]) <= kMinGap) {
                fail(ErrorKind::InvariantViolation,
                     at(field, i, sub) + ": coincides with entry " + std::to_string(j));
            }
        }
    }
}

bool lex_less(cd a, cd b)
{
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

std::vector<int> lex_order(const std::vector<cd>& zs)
{
    std::vector<int> idx(zs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return lex_less(zs[i], zs[j]); });
    return idx;
}

void guard_pole(cd z, cd zi)
{
    if (std::abs(z - zi) < kPoleGuard) {
        fail(ErrorKind::EvaluationAtPole, "evaluation within 1e-10 of a pole");
    }
}

cd bilinear(const CVector& x, const CVector& y)
{
    return x.transpose() * y;
}

// Product of factors [from, to) evaluated at z, identity when empty.
CMatrix factor_range(const RationalMultiplicative& m, int from, int to, cd z)
{
    CMatrix M = CMatrix::Identity(m.N(), m.N());
    for (int k = from; k < to; ++k) {
        M = M * factor_matrix(m.factors[k], z);
    }
    return M;
}

double normalized(const CMatrix& M, const CMatrix& R)
{
    const double scale = std::max(M.cwiseAbs().maxCoeff(), R.cwiseAbs().maxCoeff());
    return scale == 0.0 ? 0.0 : (M - R).cwiseAbs().maxCoeff() / scale;
}

void guard_spectral_pair(const std::vector<cd>& poles, cd w1, cd w2)
{
    if (std::abs(w1 - w2) < kPoleGuard) {
        fail(ErrorKind::PoleHit, "spectral points coincide");
    }
    for (cd z : poles) {
        if (std::abs(w1 - z) < kPoleGuard || std::abs(w2 - z) < kPoleGuard) {
            fail(ErrorKind::PoleHit, "spectral point on a pole of L");
        }
    }
}

CVector K1_from_additive(const RationalAdditive& rep)
{
    CVector K1 = CVector::Zero(rep.N());
    for (const auto& p : rep.poles) {
        K1 += p.a.cwiseProduct(p.b);
    }
    return K1;
}

void check_distinct_diagonal(const CMatrix& L0)
{
    try {
        validate_L0(L0);
    } catch (const Error& e) {
        fail(ErrorKind::DegenerateL0, e.what());
    }
    const double scale = L0.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < L0.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (std::abs(L0(i, i) - L0(j, j)) <= kMinGap * std::max(1.0, scale)) {
                fail(ErrorKind::DegenerateL0, "L0 has repeated diagonal entries");
            }
        }
    }
}

double casimir_against_entries(const PoissonStructure& P, const CVector& x,
                               const std::vector<CMatrix>& J,
                               const std::vector<CVector>& scalar_grads)
{
    if (scalar_grads.empty()) {
        return 0.0;
    }
    double worst = 0.0;
    const auto N = J.front().rows();
    for (const CVector& g : scalar_grads) {
        for (Eigen::Index i = 0; i < N; ++i) {
            for (Eigen::Index j = 0; j < N; ++j) {
                CVector h(x.size());
                for (Eigen::Index a = 0; a < x.size(); ++a) {
                    h(a) = J[a](i, j);
                }
                worst = std::max(worst, bracket_normalized(P, g, h, x));
            }
        }
    }
    return worst;
}

std::vector<CVector> pair_scalar_gradients(const CVector& x, int N, int d)
{
    // grad of second_i^T first_i within block i.
    std::vector<CVector> out;
    for (int i = 0; i < d; ++i) {
        CVector g = CVector::Zero(x.size());
        g.segment(i * 2 * N, N) = x.segment(i * 2 * N + N, N);
        g.segment(i * 2 * N + N, N) = x.segment(i * 2 * N, N);
        out.push_back(g);
    }
    return out;
}

} // namespace

void RationalAdditive::validate() const
{
    validate_L0(L0);
    std::vector<cd> zs;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (poles[i].a.size() != N()) {
            fail(ErrorKind::InvariantViolation, at("poles", i, "a") + ": length differs from N");
        }
        if (poles[i].b.size() != N()) {
            fail(ErrorKind::InvariantViolation, at("poles", i, "b") + ": length differs from N");
        }
        zs.push_back(poles[i].z);
    }
    check_gaps(zs, "poles", "z");
}

void RationalMultiplicative::validate() const
{
    validate_L0(L0);
    std::vector<cd> zs;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& f = factors[i];
        if (f.p.size() != N()) {
            fail(ErrorKind::InvariantViolation, at("factors", i, "p") + ": length differs from N");
        }
        if (f.q.size() != N()) {
            fail(ErrorKind::InvariantViolation, at("factors", i, "q") + ": length differs from N");
        }
        zs.push_back(f.z);
    }
    check_gaps(zs, "factors", "z");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        zs.push_back(factors[i].z_minus());
    }
    // Gap rule over the union {z_i} and {z_i^-}; indices past d name the zero of factor i - d.
    for (std::size_t i = factors.size(); i < zs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(zs[i] - zs[j]) <= kMinGap) {
                fail(ErrorKind::InvariantViolation,
                     at("factors", i - factors.size(), "q") + ": z - q^T p is not in general position");
            }
        }
    }
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& f = factors[i];
        const double r = 1.0 + std::abs(f.z) + std::abs(f.z_minus() - f.z);
        for (int k = 0; k < 3; ++k) {
            const cd z = f.z + r * std::exp(kI * (0.7 + 2.1 * k));
            const cd expect = (z - f.z_minus()) / (z - f.z);
            const double scale = 1.0 + std::abs(expect) + f.p.norm() * f.q.norm() / std::abs(z - f.z);
            if (std::abs(det(factor_matrix(f, z)) - expect) > 1e-10 * scale) {
                fail(ErrorKind::InvariantViolation, at("factors", i, "p") + ": determinant law fails");
            }
        }
    }
}

CMatrix eval_additive(const RationalAdditive& rep, cd z)
{
    CMatrix L = rep.L0;
    for (const auto& p : rep.poles) {
        guard_pole(z, p.z);
        L += p.a * p.b.transpose() / (z - p.z);
    }
    return L;
}

CMatrix factor_matrix(const RationalFactor& f, cd z)
{
    guard_pole(z, f.z);
    return CMatrix::Identity(f.p.size(), f.p.size()) + f.p * f.q.transpose() / (z - f.z);
}

CMatrix eval_multiplicative(const RationalMultiplicative& m, cd z)
{
    return m.L0 * factor_range(m, 0, m.d(), z);
}

RationalAdditive to_additive(const RationalMultiplicative& m)
{
    m.validate();
    RationalAdditive out;
    out.L0 = m.L0;
    for (int i = 0; i < m.d(); ++i) {
        const auto& f = m.factors[i];
        const CMatrix left = m.L0 * factor_range(m, 0, i, f.z);
        const CMatrix right = factor_range(m, i + 1, m.d(), f.z);
        RationalPole p{f.z, left * f.p, (f.q.transpose() * right).transpose()};
        const double scale = (left.norm() * f.p.norm()) * (f.q.norm() * right.norm());
        if (!(p.a.norm() * p.b.norm() > 1e-14 * scale)) {
            fail(ErrorKind::ResidueRankNotOne, "residue at pole " + std::to_string(i) + " vanishes");
        }
        out.poles.push_back(std::move(p));
    }
    return out;
}

std::vector<cd> det_zeros(const RationalAdditive& rep)
{
    rep.validate();
    const int d = rep.d();
    if (d == 0) {
        return {};
    }
    const cd det0 = det(rep.L0);
    if (!(std::abs(det0) > 1e-13 * std::pow(rep.L0.cwiseAbs().maxCoeff(), double(rep.N())))) {
        fail(ErrorKind::DegenerateDeterminant, "L0 is singular");
    }
    cd c = 0.0;
    for (const auto& p : rep.poles) {
        c += p.z;
    }
    c /= double(d);
    double spread = 0.0;
    for (const auto& p : rep.poles) {
        spread = std::max(spread, std::abs(p.z - c));
    }
    const double R = 2.0 * spread + 1.0;
    // p(c + R w) sampled at M roots of unity; its w-coefficients follow by a DFT.
    const int M = 2 * d + 2;
    std::vector<cd> vals(M);
    for (int k = 0; k < M; ++k) {
        const cd w = std::exp(2.0 * kI * kPi * (double(k) / M));
        const cd z = c + R * w;
        cd v = det(eval_additive(rep, z)) / det0;
        for (const auto& p : rep.poles) {
            v *= (z - p.z);
        }
        vals[k] = v;
    }
    std::vector<cd> coeff(d + 1);
    double cmax = 0.0;
    double tail = 0.0;
    for (int j = 0; j < M; ++j) {
        cd s = 0.0;
        for (int k = 0; k < M; ++k) {
            s += vals[k] * std::exp(-2.0 * kI * kPi * (double(j) * k / M));
        }
        s /= double(M);
        if (j <= d) {
            coeff[j] = s;
            cmax = std::max(cmax, std::abs(s));
        } else {
            tail = std::max(tail, std::abs(s));
        }
    }
    // Monic in z means leading w-coefficient R^d; a collapse signals a lower degree.
    if (!(std::abs(coeff[d]) > 1e-8 * cmax) || tail > 1e-6 * cmax) {
        fail(ErrorKind::DegenerateDeterminant, "numerator of det L has degree below d");
    }
    std::vector<cd> roots = poly_roots(coeff);
    for (cd& r : roots) {
        r = c + R * r;
    }
    sort_lex(roots);
    return roots;
}

std::vector<int> canonical_pairing(const RationalAdditive& rep)
{
    std::vector<cd> zs;
    for (const auto& p : rep.poles) {
        zs.push_back(p.z);
    }
    const auto order = lex_order(zs);
    std::vector<int> pairing(zs.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        pairing[order[rank]] = static_cast<int>(rank);
    }
    return pairing;
}

RationalMultiplicative to_multiplicative(const RationalAdditive& rep, const std::vector<int>& pairing)
{
    rep.validate();
    const int d = rep.d();
    const int N = rep.N();
    const std::vector<cd> zeros = det_zeros(rep);
    std::vector<int> pair = pairing.empty() ? canonical_pairing(rep) : pairing;
    if (static_cast<int>(pair.size()) != d) {
        fail(ErrorKind::InvariantViolation, "pairing: length differs from pole count");
    }
    {
        std::vector<int> sorted = pair;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < d; ++i) {
            if (sorted[i] != i) {
                fail(ErrorKind::InvariantViolation, "pairing: not a permutation of 0..d-1");
            }
        }
    }
    // General position over the union of poles and zeros.
    std::vector<cd> all = zeros;
    for (const auto& p : rep.poles) {
        all.push_back(p.z);
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            // A double root of the det polynomial is only resolved to about sqrt(eps), so two
            // computed zeros are held to the wider cluster gap.
            const bool both_zeros = i < zeros.size();
            const double gap = both_zeros ? kZeroClusterGap * (1.0 + std::abs(all[i])) : kMinGap;
            if (std::abs(all[i] - all[j]) <= gap) {
                fail(ErrorKind::NotGeneralPosition, "det zeros or poles coincide");
            }
        }
    }

    RationalMultiplicative out;
    out.L0 = rep.L0;
    out.factors.resize(d);
    // Peel B_d first: L_k = L B_d^-1 ... B_{k+1}^-1 = L0 B_1 ... B_k.
    auto tail_inverse = [&](int k, cd z) {
        CMatrix T = CMatrix::Identity(N, N);
        for (int j = d - 1; j > k; --j) {
            const auto& f = out.factors[j];
            T = T * (CMatrix::Identity(N, N) - f.p * f.q.transpose() / (z - f.z_minus()));
        }
        return T;
    };
    for (int k = d - 1; k >= 0; --k) {
        const cd zk = rep.poles[k].z;
        const cd zm = zeros[pair[k]];
        // Residue row direction: b_k^T B_d^-1(z_k) ... B_{k+1}^-1(z_k).
        CVector q = (rep.poles[k].b.transpose() * tail_inverse(k, zk)).transpose();
        if (!(q.norm() > 0.0)) {
            fail(ErrorKind::PairingInconsistent, "residue row vanishes at pole " + std::to_string(k));
        }
        q /= q.norm();
        const CMatrix Lk = eval_additive(rep, zm) * tail_inverse(k, zm);
        CVector p = CVector::Ones(1);
        try {
            // A scalar L vanishes at its zero; there is no relative rank gap to test.
            if (N > 1) {
                p = kernel_vector(Lk, kKernelTol);
            }
        } catch (const Error& e) {
            fail(ErrorKind::NotGeneralPosition,
                 std::string("kernel at det zero of factor ") + std::to_string(k) + ": " + e.what());
        }
        const cd qp = bilinear(q, p);
        if (!(std::abs(qp) > 1e-10)) {
            fail(ErrorKind::PairingInconsistent, "q^T p vanishes for factor " + std::to_string(k));
        }
        p *= (zk - zm) / qp;
        out.factors[k] = RationalFactor{zk, p, q};
    }
    return out;
}

std::vector<cd> sample_points(const RationalAdditive& rep, int count)
{
    cd c = 0.0;
    double spread = 0.0;
    for (const auto& p : rep.poles) {
        c += p.z;
    }
    if (rep.d() > 0) {
        c /= double(rep.d());
    }
    for (const auto& p : rep.poles) {
        spread = std::max(spread, std::abs(p.z - c));
    }
    std::vector<cd> pts;
    for (int k = 0; k < count; ++k) {
        // Radii alternate inside and outside the pole cloud; angles avoid rational multiples.
        const double r = (k % 2 == 0 ? 1.3 : 0.55) * spread + 0.5;
        pts.push_back(c + r * std::exp(kI * (0.37 + 2.0 * kPi * 0.618034 * k)));
    }
    return pts;
}

double reconstruction_error(const RationalAdditive& rep, const RationalMultiplicative& m,
                            const std::vector<cd>& points)
{
    const auto pts = points.empty() ? sample_points(rep) : points;
    double worst = 0.0;
    for (cd z : pts) {
        const CMatrix A = eval_additive(rep, z);
        const CMatrix B = eval_multiplicative(m, z);
        worst = std::max(worst, (A - B).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff());
    }
    return worst;
}

CMatrix rational_r(cd z, int N)
{
    if (std::abs(z) < 1e-12) {
        fail(ErrorKind::PoleAtZero, "rational r-matrix evaluated at 0");
    }
    return permutation_matrix(N) / z;
}

double cybe_residual(const std::function<CMatrix(cd)>& r, cd u, cd v, int N)
{
    CMatrix a, b, c;
    try {
        a = r(u - v);
        b = r(u);
        c = r(v);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::PoleAtZero || e.kind() == ErrorKind::PoleAtArgument) {
            fail(ErrorKind::PoleHit, e.what());
        }
        throw;
    }
    if (a.rows() != N * N || b.rows() != N * N || c.rows() != N * N) {
        fail(ErrorKind::DimensionMismatch, "r-matrix size differs from N^2");
    }
    const CMatrix I = CMatrix::Identity(N, N);
    const CMatrix P23 = kron(I, permutation_matrix(N));
    const CMatrix r12 = kron(a, I);
    const CMatrix r13 = P23 * kron(b, I) * P23;
    const CMatrix r23 = kron(I, c);
    const CMatrix S = commutator(r12, r13) + commutator(r12, r23) + commutator(r13, r23);
    const double na = r12.norm(), nb = r13.norm(), nc = r23.norm();
    const double scale = na * nb + na * nc + nb * nc;
    return scale == 0.0 ? 0.0 : S.norm() / scale;
}

PoissonStructure pole_pair_structure(int N, int d)
{
    PoissonStructure P;
    for (int i = 0; i < d; ++i) {
        for (int l = 0; l < N; ++l) {
            P.coord_names.push_back("x" + std::to_string(i) + "_" + std::to_string(l));
        }
        for (int l = 0; l < N; ++l) {
            P.coord_names.push_back("y" + std::to_string(i) + "_" + std::to_string(l));
        }
    }
    const int n = 2 * N * d;
    CMatrix pi = CMatrix::Zero(n, n);
    for (int i = 0; i < d; ++i) {
        for (int l = 0; l < N; ++l) {
            const int first = i * 2 * N + l;
            const int second = first + N;
            pi(second, first) = 1.0;
            pi(first, second) = -1.0;
        }
    }
    P.pi = [pi](const CVector&) { return pi; };
    return P;
}

CVector coordinates(const RationalAdditive& rep)
{
    const int N = rep.N();
    CVector x(2 * N * rep.d());
    for (int i = 0; i < rep.d(); ++i) {
        x.segment(i * 2 * N, N) = rep.poles[i].a;
        x.segment(i * 2 * N + N, N) = rep.poles[i].b;
    }
    return x;
}

CVector coordinates(const RationalMultiplicative& m)
{
    const int N = m.N();
    CVector x(2 * N * m.d());
    for (int i = 0; i < m.d(); ++i) {
        x.segment(i * 2 * N, N) = m.factors[i].p;
        x.segment(i * 2 * N + N, N) = m.factors[i].q;
    }
    return x;
}

MatrixFamily additive_family(const RationalAdditive& rep)
{
    const int N = rep.N();
    auto unpack = [rep, N](const CVector& x) {
        RationalAdditive r = rep;
        for (int i = 0; i < r.d(); ++i) {
            r.poles[i].a = x.segment(i * 2 * N, N);
            r.poles[i].b = x.segment(i * 2 * N + N, N);
        }
        return r;
    };
    MatrixFamily F;
    F.eval = [unpack](const CVector& x, cd z) { return eval_additive(unpack(x), z); };
    F.jac = [unpack, N](const CVector& x, cd z) {
        const RationalAdditive r = unpack(x);
        std::vector<CMatrix> J;
        for (const auto& p : r.poles) {
            guard_pole(z, p.z);
            for (int s = 0; s < N; ++s) {
                CMatrix e = CMatrix::Zero(N, N);
                e.row(s) = p.b.transpose() / (z - p.z);
                J.push_back(e);
            }
            for (int l = 0; l < N; ++l) {
                CMatrix e = CMatrix::Zero(N, N);
                e.col(l) = p.a / (z - p.z);
                J.push_back(e);
            }
        }
        return J;
    };
    return F;
}

MatrixFamily multiplicative_family(const RationalMultiplicative& m)
{
    const int N = m.N();
    auto unpack = [m, N](const CVector& x) {
        RationalMultiplicative r = m;
        for (int i = 0; i < r.d(); ++i) {
            r.factors[i].p = x.segment(i * 2 * N, N);
            r.factors[i].q = x.segment(i * 2 * N + N, N);
        }
        return r;
    };
    MatrixFamily F;
    F.eval = [unpack](const CVector& x, cd z) { return eval_multiplicative(unpack(x), z); };
    F.jac = [unpack, N](const CVector& x, cd z) {
        const RationalMultiplicative r = unpack(x);
        std::vector<CMatrix> J;
        for (int i = 0; i < r.d(); ++i) {
            const auto& f = r.factors[i];
            const CMatrix left = r.L0 * factor_range(r, 0, i, z) / (z - f.z);
            const CMatrix right = factor_range(r, i + 1, r.d(), z);
            const CVector lp = left * f.p;
            const CVector qr = (f.q.transpose() * right).transpose();
            for (int s = 0; s < N; ++s) {
                J.push_back(left.col(s) * qr.transpose());
            }
            for (int l = 0; l < N; ++l) {
                J.push_back(lp * right.row(l));
            }
        }
        return J;
    };
    return F;
}

double bracket_check_linear(const RationalAdditive& rep, cd w1, cd w2)
{
    std::vector<cd> zs;
    for (const auto& p : rep.poles) {
        zs.push_back(p.z);
    }
    guard_spectral_pair(zs, w1, w2);
    const int N = rep.N();
    const CMatrix M = tensor_bracket(pole_pair_structure(N, rep.d()), additive_family(rep),
                                     coordinates(rep), w1, w2);
    const CMatrix I = CMatrix::Identity(N, N);
    const CMatrix X = kron(eval_additive(rep, w1), I) + kron(I, eval_additive(rep, w2));
    return normalized(M, commutator(rational_r(w1 - w2, N), X));
}

double bracket_check_quadratic(const RationalMultiplicative& m, cd w1, cd w2)
{
    std::vector<cd> zs;
    for (const auto& f : m.factors) {
        zs.push_back(f.z);
    }
    guard_spectral_pair(zs, w1, w2);
    const int N = m.N();
    const CMatrix M = tensor_bracket(pole_pair_structure(N, m.d()), multiplicative_family(m),
                                     coordinates(m), w1, w2);
    const CMatrix X = kron(eval_multiplicative(m, w1), eval_multiplicative(m, w2));
    return normalized(M, commutator(rational_r(w1 - w2, N), X));
}

LeafInvariants leaf_invariants(const RationalAdditive& rep)
{
    check_distinct_diagonal(rep.L0);
    LeafInvariants out;
    out.K0 = rep.L0.diagonal();
    out.K1 = K1_from_additive(rep);
    for (const auto& p : rep.poles) {
        out.orbit_scalars.push_back(bilinear(p.b, p.a));
    }
    return out;
}

LeafInvariants leaf_invariants(const RationalMultiplicative& m)
{
    check_distinct_diagonal(m.L0);
    LeafInvariants out;
    out.K0 = m.L0.diagonal();
    out.K1 = K1_from_additive(to_additive(m));
    for (const auto& f : m.factors) {
        out.orbit_scalars.push_back(bilinear(f.q, f.p));
    }
    return out;
}

double orbit_scalar_casimir_residual(const RationalAdditive& rep, cd w)
{
    const CVector x = coordinates(rep);
    return casimir_against_entries(pole_pair_structure(rep.N(), rep.d()), x,
                                   additive_family(rep).jac(x, w),
                                   pair_scalar_gradients(x, rep.N(), rep.d()));
}

double orbit_scalar_casimir_residual(const RationalMultiplicative& m, cd w)
{
    const CVector x = coordinates(m);
    return casimir_against_entries(pole_pair_structure(m.N(), m.d()), x,
                                   multiplicative_family(m).jac(x, w),
                                   pair_scalar_gradients(x, m.N(), m.d()));
}

} // namespace laxkit
