#include "doctest.h"

#include "laxkit/errors.hpp"
#include "laxkit/poisson_engine.hpp"
#include "test_support.hpp"

using namespace laxkit;
using laxkit::testing::max_abs;
using laxkit::testing::Sampler;

namespace {

PoissonStructure canonical_plane()
{
    return {{"q", "p"}, [](const CVector&) {
                CMatrix m(2, 2);
                m << 0.0, 1.0, -1.0, 0.0;
                return m;
            }};
}

// Lie-Poisson structure of so(3): {x1, x2} = x3 and cyclic.
PoissonStructure so3()
{
    return {{"x1", "x2", "x3"}, [](const CVector& x) {
                CMatrix m(3, 3);
                m << 0.0, x(2), -x(1), -x(2), 0.0, x(0), x(1), -x(0), 0.0;
                return m;
            }};
}

// Quadratic structure {x_a, x_b} = c_ab x_a x_b (log-canonical); Jacobi holds for any c.
// Adding eps * x_3^2 to {x_1, x_2} breaks it.
PoissonStructure log_canonical(double eps)
{
    return {{"x1", "x2", "x3"}, [eps](const CVector& x) {
                CMatrix m = CMatrix::Zero(3, 3);
                m(0, 1) = 1.0 * x(0) * x(1) + eps * x(2) * x(2);
                m(0, 2) = -2.0 * x(0) * x(2);
                m(1, 2) = 0.5 * x(1) * x(2);
                m(1, 0) = -m(0, 1);
                m(2, 0) = -m(0, 2);
                m(2, 1) = -m(1, 2);
                return m;
            }};
}

// F(x, z) = [[x1, x2 z], [x3, x1 x2 + z]].
MatrixFamily toy_family()
{
    MatrixFamily F;
    F.eval = [](const CVector& x, cd z) {
        CMatrix m(2, 2);
        m << x(0), x(1) * z, x(2), x(0) * x(1) + z;
        return m;
    };
    F.jac = [](const CVector& x, cd z) {
        std::vector<CMatrix> J(3, CMatrix::Zero(2, 2));
        J[0](0, 0) = 1.0;
        J[0](1, 1) = x(1);
        J[1](0, 1) = z;
        J[1](1, 1) = x(0);
        J[2](1, 0) = 1.0;
        return J;
    };
    return F;
}

CVector unit(int n, int k)
{
    CVector e = CVector::Zero(n);
    e(k) = 1.0;
    return e;
}

} // namespace

TEST_CASE("bracket_scalar basics")
{
    const auto P = canonical_plane();
    const CVector x = CVector::Zero(2);
    CHECK(std::abs(bracket_scalar(P, unit(2, 0), unit(2, 1), x) - 1.0) < 1e-15);

    Sampler rng(21);
    const auto Q = so3();
    const CVector y = rng.gaussian_vector(3);
    const CVector g = rng.gaussian_vector(3);
    CHECK(std::abs(bracket_scalar(Q, g, g, y)) < 1e-14);
    CHECK_THROWS_AS(bracket_scalar(Q, unit(2, 0), g, y), Error);
}

TEST_CASE("Leibniz consistency on monomials")
{
    Sampler rng(22);
    const auto P = log_canonical(0.3);
    for (int trial = 0; trial < 10; ++trial) {
        const CVector x = rng.gaussian_vector(3);
        // f = x1 x2, g = x3 x1
        CVector gf = CVector::Zero(3);
        gf(0) = x(1);
        gf(1) = x(0);
        CVector gg = CVector::Zero(3);
        gg(0) = x(2);
        gg(2) = x(0);
        const CMatrix pi = P.pi(x);
        const cd expand = x(1) * x(2) * pi(0, 0) + x(1) * x(0) * pi(0, 2) +
                          x(0) * x(2) * pi(1, 0) + x(0) * x(0) * pi(1, 2);
        CHECK(std::abs(bracket_scalar(P, gf, gg, x) - expand) < 1e-10 * (1.0 + std::abs(expand)));
    }
}

TEST_CASE("jacobi_residual separates Poisson from non-Poisson structures")
{
    Sampler rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const CVector x = rng.gaussian_vector(3);
        CHECK(jacobi_residual(so3(), x) < 1e-9);
        CHECK(jacobi_residual(log_canonical(0.0), x) < 1e-9);
        CHECK(jacobi_residual(log_canonical(0.5), x) > 1e-4);
    }
    CHECK(jacobi_residual(canonical_plane(), CVector::Zero(2)) == 0.0);
}

TEST_CASE("jacobi_residual is scale invariant for homogeneous structures")
{
    Sampler rng(24);
    for (int trial = 0; trial < 5; ++trial) {
        const CVector x = rng.gaussian_vector(3);
        const auto P = log_canonical(0.5);
        CHECK(std::abs(jacobi_residual(P, 2.0 * x) - jacobi_residual(P, x)) < 1e-9);
    }
}

TEST_CASE("casimir_residual")
{
    Sampler rng(25);
    const CVector x = rng.gaussian_vector(3);
    // |x|^2 is the so(3) Casimir; x1 is not.
    CHECK(casimir_residual(so3(), 2.0 * x, x) < 1e-14);
    CHECK(casimir_residual(so3(), unit(3, 0), x) > 1e-2);
}

TEST_CASE("tensor_bracket antisymmetry and shape")
{
    Sampler rng(26);
    const auto P = log_canonical(0.0);
    const auto F = toy_family();
    const CMatrix Perm = permutation_matrix(2);
    for (int trial = 0; trial < 5; ++trial) {
        const CVector x = rng.gaussian_vector(3);
        const cd w1 = rng.gaussian();
        const cd w2 = rng.gaussian();
        const CMatrix M12 = tensor_bracket(P, F, x, w1, w2);
        const CMatrix M21 = tensor_bracket(P, F, x, w2, w1);
        CHECK(M12.rows() == 4);
        CHECK(max_abs(M12 + Perm * M21 * Perm) < 1e-10 * (1.0 + max_abs(M12)));
        CHECK(jacobian_consistency(F, x, w1) < 1e-6);
    }
    // Entry (ik),(jl) equals {F_ij(w1), F_kl(w2)} computed by bracket_scalar.
    const CVector x = rng.gaussian_vector(3);
    const cd w1 = 0.3, w2 = -0.7;
    const CMatrix M = tensor_bracket(P, F, x, w1, w2);
    const auto J1 = F.jac(x, w1);
    const auto J2 = F.jac(x, w2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    CVector gf(3), gg(3);
                    for (int a = 0; a < 3; ++a) {
                        gf(a) = J1[a](i, j);
                        gg(a) = J2[a](k, l);
                    }
                    CHECK(std::abs(M(i * 2 + k, j * 2 + l) - bracket_scalar(P, gf, gg, x)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("direct_sum keeps blocks independent")
{
    const auto S = direct_sum({so3(), canonical_plane()});
    CHECK(S.dim() == 5);
    Sampler rng(27);
    const CVector x = rng.gaussian_vector(5);
    const CMatrix pi = S.eval(x);
    CHECK(max_abs(pi.block(0, 3, 3, 2)) == 0.0);
    CHECK(std::abs(pi(3, 4) - 1.0) < 1e-15);
    CHECK(jacobi_residual(S, x) < 1e-9);
}

TEST_CASE("non-antisymmetric structure is rejected")
{
    PoissonStructure bad{{"a", "b"}, [](const CVector&) {
                             CMatrix m(2, 2);
                             m << 0.0, 1.0, 1.0, 0.0;
                             return m;
                         }};
    CHECK_THROWS_AS(bad.eval(CVector::Zero(2)), Error);
}
