#include "doctest.h"

#include <set>

#include "laxkit/errors.hpp"
#include "laxkit/rational_lax.hpp"
#include "test_support.hpp"

using namespace laxkit;
using laxkit::testing::max_abs;
using laxkit::testing::random_additive;
using laxkit::testing::random_multiplicative;
using laxkit::testing::rel_diff;
using laxkit::testing::Sampler;

namespace {

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvariantViolation;
}

} // namespace

TEST_CASE("eval: constant, residues, infinity")
{
    Sampler rng(31);
    RationalAdditive empty = random_additive(rng, 3, 0);
    CHECK(max_abs(eval_additive(empty, 0.4) - empty.L0) == 0.0);

    const RationalAdditive rep = random_additive(rng, 3, 2);
    for (const auto& p : rep.poles) {
        const CMatrix res = contour_residue(
            std::function<CMatrix(cd)>([&](cd z) { return eval_additive(rep, z); }), p.z, 1e-3);
        CHECK(rel_diff(res, p.a * p.b.transpose()) < 1e-9);
    }
    CHECK(kind_of([&] { eval_additive(rep, rep.poles[0].z); }) == ErrorKind::EvaluationAtPole);

    const RationalMultiplicative m = random_multiplicative(rng, 3, 3);
    CHECK(max_abs(eval_multiplicative(m, 1e6) - m.L0) < 1e-5 * max_abs(m.L0));
}

TEST_CASE("to_additive")
{
    Sampler rng(32);
    const RationalMultiplicative one = random_multiplicative(rng, 2, 1);
    const RationalAdditive a1 = to_additive(one);
    const auto& f = one.factors[0];
    CHECK(rel_diff(a1.poles[0].a * a1.poles[0].b.transpose(), one.L0 * f.p * f.q.transpose()) < 1e-14);

    // Disjoint supports: q_1 and p_2 orthogonal so cross terms vanish at both poles.
    RationalMultiplicative two;
    two.L0 = one.L0;
    CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    two.factors = {{cd(0.3, 0.1), 0.7 * e0, 1.3 * e0}, {cd(-0.4, 0.2), 1.1 * e1, -0.6 * e1}};
    const RationalAdditive a2 = to_additive(two);
    for (int i = 0; i < 2; ++i) {
        const auto& g = two.factors[i];
        CHECK(rel_diff(a2.poles[i].a * a2.poles[i].b.transpose(), two.L0 * g.p * g.q.transpose()) < 1e-14);
    }

    // The additive form reproduces the product everywhere.
    const RationalMultiplicative m = random_multiplicative(rng, 3, 4);
    const RationalAdditive a = to_additive(m);
    for (cd z : sample_points(a)) {
        CHECK(rel_diff(eval_additive(a, z), eval_multiplicative(m, z)) < 1e-10);
    }
}

TEST_CASE("det_zeros")
{
    Sampler rng(33);
    // Rank-one determinant lemma: z^- = z_1 - b^T L0^{-1} a.
    const RationalAdditive one = random_additive(rng, 2, 1);
    const auto z1 = det_zeros(one);
    REQUIRE(z1.size() == 1);
    const auto& p = one.poles[0];
    const cd expect = p.z - cd(p.b.transpose() * one.L0.inverse() * p.a);
    CHECK(std::abs(z1[0] - expect) < 1e-10 * (1.0 + std::abs(expect)));

    // Determinant oracle at random points.
    const RationalAdditive rep = random_additive(rng, 3, 4);
    const auto zs = det_zeros(rep);
    REQUIRE(zs.size() == 4);
    for (int t = 0; t < 10; ++t) {
        const cd z = rng.complex_box(3.0, 3.0);
        cd prod = det(rep.L0);
        for (int i = 0; i < 4; ++i) {
            prod *= (z - zs[i]) / (z - rep.poles[i].z);
        }
        const cd direct = det(eval_additive(rep, z));
        CHECK(std::abs(prod - direct) < 1e-9 * std::abs(direct));
    }

    // Construction oracle: zeros of a product are the z_i - q_i^T p_i.
    const RationalMultiplicative m = random_multiplicative(rng, 3, 3);
    std::vector<cd> expect_zeros;
    for (const auto& f : m.factors) {
        expect_zeros.push_back(f.z_minus());
    }
    sort_lex(expect_zeros);
    const auto found = det_zeros(to_additive(m));
    REQUIRE(found.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(found[i] - expect_zeros[i]) < 1e-8);
    }
}

TEST_CASE("to_multiplicative: single factor identification")
{
    Sampler rng(34);
    const RationalAdditive rep = random_additive(rng, 3, 1);
    const RationalMultiplicative m = to_multiplicative(rep);
    const auto& f = m.factors[0];
    const auto& p = rep.poles[0];
    CHECK(rel_diff(f.p * f.q.transpose(), rep.L0.inverse() * p.a * p.b.transpose()) < 1e-12);
    CHECK(std::abs(f.z_minus() - det_zeros(rep)[0]) < 1e-10);
}

TEST_CASE("to_multiplicative: reconstruction and alternative pairings")
{
    Sampler rng(35);
    for (int trial = 0; trial < 5; ++trial) {
        const RationalAdditive rep = random_additive(rng, 3, 3);
        const RationalMultiplicative m = to_multiplicative(rep);
        CHECK(reconstruction_error(rep, m) < 1e-8);

        // Cyclic shift of the canonical assignment: every pole takes a different zero.
        std::vector<int> alt = canonical_pairing(rep);
        for (int& k : alt) {
            k = (k + 1) % 3;
        }
        const RationalMultiplicative m2 = to_multiplicative(rep, alt);
        CHECK(reconstruction_error(rep, m2) < 1e-8);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(m.factors[i].z_minus() - m2.factors[i].z_minus()) > 1e-6);
        }
    }
}

TEST_CASE("to_multiplicative guards")
{
    Sampler rng(36);
    RationalAdditive rep = random_additive(rng, 2, 2);
    CHECK(kind_of([&] { to_multiplicative(rep, {0, 0}); }) == ErrorKind::InvariantViolation);
    CHECK(kind_of([&] { to_multiplicative(rep, {0}); }) == ErrorKind::InvariantViolation);

    // L = diag(1 + 1/z, 1 + 2/(z - 1)): both entries vanish at z = -1.
    RationalAdditive deg;
    deg.L0 = CMatrix::Identity(2, 2);
    CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    deg.poles = {{cd(0.0, 0.0), e0, e0}, {cd(1.0, 0.0), e1, 2.0 * e1}};
    CHECK(kind_of([&] { to_multiplicative(deg); }) == ErrorKind::NotGeneralPosition);

    // Scalar L = 1 - 0.5 / z + 0.5 / (z - 2) = (z - 1)^2 / (z (z - 2)): a double det zero.
    RationalAdditive dbl;
    dbl.L0 = CMatrix::Identity(1, 1);
    const CVector one = CVector::Ones(1);
    dbl.poles = {{cd(0.0), one, -0.5 * one}, {cd(2.0), one, 0.5 * one}};
    const auto zeros = det_zeros(dbl);
    CHECK(std::abs(zeros[0] - 1.0) < 1e-6);
    CHECK(std::abs(zeros[1] - 1.0) < 1e-6);
    CHECK(kind_of([&] { to_multiplicative(dbl); }) == ErrorKind::NotGeneralPosition);
}

TEST_CASE("validation names the offending field")
{
    Sampler rng(37);
    RationalAdditive rep = random_additive(rng, 2, 2);
    rep.poles[1].z = rep.poles[0].z;
    try {
        rep.validate();
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvariantViolation);
        CHECK(std::string(e.what()).find("poles[1].z") != std::string::npos);
    }
    RationalMultiplicative m = random_multiplicative(rng, 2, 1);
    m.L0(0, 1) = 1.0;
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("rational r-matrix and CYBE")
{
    CHECK(max_abs(rational_r(1.0, 3) - permutation_matrix(3)) == 0.0);
    CMatrix half = CMatrix::Zero(4, 4);
    for (int a = 0; a < 4; ++a) {
        half += 0.25 * kron(pauli(a), pauli(a));
    }
    CHECK(max_abs(rational_r(2.0, 2) - half) < 1e-15);
    CHECK(kind_of([] { rational_r(0.0, 2); }) == ErrorKind::PoleAtZero);

    auto r = [](cd z) { return rational_r(z, 2); };
    CHECK(cybe_residual(r, 0.7, cd(0.31, 0.2), 2) < 1e-12);
    Sampler rng(38);
    for (int t = 0; t < 10; ++t) {
        const cd u = rng.complex_box(1.0, 1.0);
        const cd v = rng.complex_box(1.0, 1.0);
        CHECK(cybe_residual([](cd z) { return rational_r(z, 3); }, u, v, 3) < 1e-12);
        CHECK(cybe_residual([](cd z) { return CMatrix(permutation_matrix(2) / (z * z)); }, u, v, 2) >
              1e-2);
    }
    CHECK(kind_of([&] { cybe_residual(r, 0.5, 0.5, 2); }) == ErrorKind::PoleHit);
}

TEST_CASE("linear bracket: engine matches the r-matrix form and its coordinate form")
{
    Sampler rng(39);
    for (int t = 0; t < 5; ++t) {
        const RationalAdditive rep = random_additive(rng, 2, 2);
        const cd w1 = rng.complex_box(3.0, 3.0);
        const cd w2 = rng.complex_box(3.0, 3.0);
        CHECK(bracket_check_linear(rep, w1, w2) < 1e-10);
    }
    const RationalAdditive rep = random_additive(rng, 3, 2);
    const cd w1(0.9, -1.1), w2(-0.4, 0.6);
    const CMatrix M = tensor_bracket(pole_pair_structure(3, 2), additive_family(rep),
                                     coordinates(rep), w1, w2);
    const CMatrix L1 = eval_additive(rep, w1), L2 = eval_additive(rep, w2);
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int l = 0; l < 3; ++l) {
                for (int s = 0; s < 3; ++s) {
                    const cd v = ((L1(l, j) - L2(l, j)) * double(i == s) +
                                  (L2(i, s) - L1(i, s)) * double(l == j)) / (w1 - w2);
                    err = std::max(err, std::abs(M(i * 3 + l, j * 3 + s) - v));
                }
            }
        }
    }
    CHECK(err < 1e-10 * max_abs(M));
}

TEST_CASE("single rank-one term bracket")
{
    // Coordinates (a, b) with constant bracket {b^l, a^l} = 1 and the family F = a b^T.
    Sampler rng(40);
    const CVector a = rng.gaussian_vector(3), b = rng.gaussian_vector(3);
    MatrixFamily F;
    F.eval = [](const CVector& x, cd) { return CMatrix(x.head(3) * x.tail(3).transpose()); };
    F.jac = [](const CVector& x, cd) {
        std::vector<CMatrix> J;
        for (int s = 0; s < 3; ++s) {
            CMatrix e = CMatrix::Zero(3, 3);
            e.row(s) = x.tail(3).transpose();
            J.push_back(e);
        }
        for (int l = 0; l < 3; ++l) {
            CMatrix e = CMatrix::Zero(3, 3);
            e.col(l) = x.head(3);
            J.push_back(e);
        }
        return J;
    };
    CVector x(6);
    x << a, b;
    const CMatrix M = tensor_bracket(pole_pair_structure(3, 1), F, x, 0.0, 0.0);
    const CMatrix A = a * b.transpose();
    const CMatrix I = CMatrix::Identity(3, 3);
    const CMatrix P = permutation_matrix(3);
    CHECK(max_abs(M - (kron(A, I) * P - kron(I, A) * P)) < 1e-12);
}

TEST_CASE("quadratic bracket: single factor and products")
{
    Sampler rng(41);
    for (int d : {1, 3}) {
        for (int t = 0; t < 5; ++t) {
            const RationalMultiplicative m = random_multiplicative(rng, 3, d);
            const cd w1 = rng.complex_box(3.0, 3.0);
            const cd w2 = rng.complex_box(3.0, 3.0);
            CHECK(bracket_check_quadratic(m, w1, w2) < (d == 1 ? 1e-12 : 1e-9));
        }
    }
    // The multiplicative Jacobian agrees with finite differences.
    const RationalMultiplicative m = random_multiplicative(rng, 2, 3);
    CHECK(jacobian_consistency(multiplicative_family(m), coordinates(m), cd(0.3, 2.5)) < 1e-6);
    const RationalAdditive a = random_additive(rng, 2, 3);
    CHECK(jacobian_consistency(additive_family(a), coordinates(a), cd(0.3, 2.5)) < 1e-6);
    CHECK(kind_of([&] { bracket_check_quadratic(m, 0.2, 0.2); }) == ErrorKind::PoleHit);
}

TEST_CASE("leaf invariants")
{
    Sampler rng(42);
    const RationalAdditive empty = random_additive(rng, 3, 0);
    const LeafInvariants e = leaf_invariants(empty);
    CHECK(e.K1.norm() == 0.0);
    CHECK((e.K0 - empty.L0.diagonal()).norm() == 0.0);

    // Asymptotic eigenvalue oracle: z (lambda_j(z) - K0_j) = K1_j + K2_j / z + K3_j / z^2 + ...,
    // extrapolated to 1/z = 0 from z = 1e3, 3e3, 1e4.
    const RationalAdditive rep = random_additive(rng, 3, 2);
    const LeafInvariants inv = leaf_invariants(rep);
    auto tracked = [&](double z) {
        const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<CMatrix>(eval_additive(rep, z)).eigenvalues();
        CVector out(3);
        for (int j = 0; j < 3; ++j) {
            int best = 0;
            for (int k = 1; k < 3; ++k) {
                if (std::abs(ev(k) - inv.K0(j)) < std::abs(ev(best) - inv.K0(j))) {
                    best = k;
                }
            }
            out(j) = z * (ev(best) - inv.K0(j));
        }
        return out;
    };
    const double t[3] = {1e-3, 1.0 / 3e3, 1e-4};
    const CVector ev[3] = {tracked(1.0 / t[0]), tracked(1.0 / t[1]), tracked(1.0 / t[2])};
    CVector k1 = CVector::Zero(3);
    for (int a = 0; a < 3; ++a) {
        // Lagrange weight of node a at t = 0.
        double w = 1.0;
        for (int b = 0; b < 3; ++b) {
            if (b != a) {
                w *= t[b] / (t[b] - t[a]);
            }
        }
        k1 += w * ev[a];
    }
    CHECK((k1 - inv.K1).cwiseAbs().maxCoeff() < 1e-6);

    // Leaf scalars commute with every entry of L.
    for (int t = 0; t < 3; ++t) {
        const cd w = rng.complex_box(3.0, 3.0);
        CHECK(orbit_scalar_casimir_residual(rep, w) < 1e-10);
        CHECK(orbit_scalar_casimir_residual(random_multiplicative(rng, 3, 3), w) < 1e-10);
    }

    // Multiplicative K1 comes through the additive form; orbit scalars are q^T p.
    const RationalMultiplicative m = random_multiplicative(rng, 3, 2);
    const LeafInvariants mi = leaf_invariants(m);
    CHECK((mi.K1 - leaf_invariants(to_additive(m)).K1).norm() < 1e-12);
    CHECK(std::abs(mi.orbit_scalars[1] - (m.factors[1].z - m.factors[1].z_minus())) < 1e-14);

    RationalAdditive flat = rep;
    flat.L0 = CMatrix::Identity(3, 3);
    CHECK(kind_of([&] { leaf_invariants(flat); }) == ErrorKind::DegenerateL0);
}
