#include "doctest.h"

#include <set>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/special_functions.hpp"
#include "test_support.hpp"

using namespace laxkit;
using laxkit::testing::max_abs;
using laxkit::testing::Sampler;

TEST_CASE("kron, commutator, anticommutator")
{
    const CMatrix s3 = pauli(3);
    const CMatrix k = kron(s3, s3);
    CHECK(k.isApprox(CVector(Eigen::Vector4cd(1.0, -1.0, -1.0, 1.0)).asDiagonal().toDenseMatrix()));

    Sampler rng(1);
    const CMatrix A = rng.gaussian_matrix(3, 3);
    CHECK(max_abs(anticommutator(A, CMatrix::Identity(3, 3)) - 2.0 * A) < 1e-14);

    // 2x2 products written out by hand.
    CMatrix s1(2, 2), s2(2, 2);
    s1 << 0.0, 1.0, 1.0, 0.0;
    s2 << 0.0, -kI, kI, 0.0;
    CMatrix expect(2, 2);
    expect << 2.0 * kI, 0.0, 0.0, -2.0 * kI;
    CHECK(max_abs(commutator(s1, s2) - expect) < 1e-15);

    CHECK_THROWS_AS(commutator(A, s1), Error);
}

TEST_CASE("kron index convention and mixed product")
{
    Sampler rng(2);
    const CMatrix A = rng.gaussian_matrix(2, 2);
    const CMatrix B = rng.gaussian_matrix(3, 3);
    const CMatrix K = kron(A, B);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 3; ++k) {
                for (int l = 0; l < 3; ++l) {
                    CHECK(std::abs(K(i * 3 + k, j * 3 + l) - A(i, j) * B(k, l)) < 1e-15);
                }
            }
        }
    }
    const CMatrix C = rng.gaussian_matrix(2, 2);
    const CMatrix D = rng.gaussian_matrix(3, 3);
    CHECK(max_abs(kron(A, B) * kron(C, D) - kron(A * C, B * D)) < 1e-12);
    const CMatrix E = rng.gaussian_matrix(2, 2);
    CHECK(max_abs(kron(kron(A, C), E) - kron(A, kron(C, E))) < 1e-12);
}

TEST_CASE("permutation matrix")
{
    CMatrix ref = CMatrix::Zero(4, 4);
    for (int a = 0; a < 4; ++a) {
        ref += 0.5 * kron(pauli(a), pauli(a));
    }
    const CMatrix P = permutation_matrix(2);
    CHECK(max_abs(P - ref) < 1e-15);
    CHECK(max_abs(P * P - CMatrix::Identity(4, 4)) < 1e-15);

    Sampler rng(3);
    const CMatrix A = rng.gaussian_matrix(3, 3);
    const CMatrix B = rng.gaussian_matrix(3, 3);
    const CMatrix P3 = permutation_matrix(3);
    CHECK(max_abs(P3 * kron(A, B) * P3 - kron(B, A)) < 1e-13);
}

TEST_CASE("det and inverse")
{
    CHECK(std::abs(det(CMatrix::Identity(3, 3)) - 1.0) < 1e-15);
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 3.0;
    CHECK(std::abs(det(D) - 6.0) < 1e-15);

    Sampler rng(4);
    const CMatrix A = rng.gaussian_matrix(4, 4) + 4.0 * CMatrix::Identity(4, 4);
    CHECK(max_abs(inverse(A) * A - CMatrix::Identity(4, 4)) < 1e-12);
    CHECK(max_abs(inverse(inverse(A)) - A) < 1e-10 * max_abs(A));

    CMatrix S = A;
    S.col(2) = S.col(0) + S.col(1);
    CHECK_THROWS_AS(inverse(S), Error);
}

TEST_CASE("kernel_vector")
{
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0) = 1.0;
    const CVector k = kernel_vector(D);
    CHECK(std::abs(k(0)) < 1e-15);
    CHECK(std::abs(k(1) - 1.0) < 1e-15);

    Sampler rng(5);
    const CVector x = rng.gaussian_vector(3);
    const CVector y = rng.gaussian_vector(3);
    try {
        kernel_vector(x * y.transpose());
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::KernelDimensionTooLarge);
    }

    CMatrix B = rng.gaussian_matrix(3, 3);
    B.col(1) = 0.3 * B.col(0) - 1.7 * B.col(2);
    const CVector v = kernel_vector(B);
    CHECK((B * v).norm() < 1e-10);
    CHECK(std::abs(v.norm() - 1.0) < 1e-14);

    try {
        kernel_vector(rng.gaussian_matrix(3, 3));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotRankDeficient);
    }
}

TEST_CASE("poly_roots")
{
    auto r = poly_roots({-1.0, 0.0, 1.0});
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] + 1.0) < 1e-14);
    CHECK(std::abs(r[1] - 1.0) < 1e-14);

    // (z - 2i)^3 = z^3 - 6i z^2 - 12 z + 8i
    auto t = poly_roots({cd(0.0, 8.0), -12.0, cd(0.0, -6.0), 1.0});
    REQUIRE(t.size() == 3);
    for (cd z : t) {
        CHECK(std::abs(z - cd(0.0, 2.0)) < 1e-5);
    }

    Sampler rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<cd> roots(6);
        for (cd& z : roots) {
            z = rng.complex_box(2.0, 2.0);
        }
        std::vector<cd> coeffs{1.0};
        for (cd z : roots) {
            std::vector<cd> next(coeffs.size() + 1, 0.0);
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                next[k + 1] += coeffs[k];
                next[k] -= z * coeffs[k];
            }
            coeffs = next;
        }
        auto found = poly_roots(coeffs);
        sort_lex(roots);
        REQUIRE(found.size() == 6);
        for (int i = 0; i < 6; ++i) {
            CHECK(std::abs(found[i] - roots[i]) < 1e-8);
        }
    }
    CHECK_THROWS_AS(poly_roots({1.0, 2.0, 0.0}), Error);
}

TEST_CASE("contour residue of a simple pole")
{
    auto f = [](cd z) { return 3.0 / (z - 0.2) + z * z; };
    CHECK(std::abs(contour_residue(std::function<cd(cd)>(f), 0.2, 1e-2) - 3.0) < 1e-12);
}

TEST_CASE("torus_roots: theta_11 has its single zero at the lattice")
{
    LatticeParams L(cd(0.0, 1.0));
    TorusDomain D(1.0, L.tau(), cd(-0.5, -0.5));
    auto f = [&](cd z) { return theta(Char::c11, z, L); };
    auto roots = torus_roots(f, D, 1);
    REQUIRE(roots.size() == 1);
    CHECK(L.lattice_distance(roots[0]) < 1e-12);
}

TEST_CASE("torus_roots: theta_00 zero at the half-period")
{
    LatticeParams L(cd(0.0, 1.0));
    TorusDomain D(1.0, L.tau());
    auto f = [&](cd z) { return theta(Char::c00, z, L); };
    auto roots = torus_roots(f, D);
    REQUIRE(roots.size() == 1);
    // Oracle: grid minimum of |theta_00| refined by Newton with a finite-difference slope.
    cd best = 0.0;
    double bmin = 1e300;
    for (int a = 1; a < 40; ++a) {
        for (int b = 1; b < 40; ++b) {
            const cd z = a / 40.0 + L.tau() * (b / 40.0);
            if (std::abs(f(z)) < bmin) {
                bmin = std::abs(f(z));
                best = z;
            }
        }
    }
    for (int it = 0; it < 30; ++it) {
        const double h = 1e-6;
        best -= f(best) / ((f(best + h) - f(best - h)) / (2.0 * h));
    }
    CHECK(std::abs(roots[0] - best) < 1e-10);
    CHECK(std::abs(roots[0] - 0.5 * (1.0 + L.tau())) < 1e-10);
}

TEST_CASE("torus_roots: many zeros force subdivision; moment sum matches")
{
    // f(z) = prod_j theta_11(z - a_j) has zeros a_j mod the lattice.
    LatticeParams L(cd(0.1, 1.2));
    Sampler rng(8);
    std::vector<cd> targets;
    for (int j = 0; j < 7; ++j) {
        targets.push_back(0.1 + rng.uniform(0.0, 0.8) + L.tau() * rng.uniform(0.1, 0.9));
    }
    auto f = [&](cd z) {
        cd p = 1.0;
        for (cd a : targets) {
            p *= theta(Char::c11, z - a, L);
        }
        return p;
    };
    TorusDomain D(1.0, L.tau());
    TorusRootOptions opts;
    auto res = torus_roots_detailed(f, D, opts);
    REQUIRE(res.roots.size() == 7);
    std::vector<cd> expect;
    for (cd a : targets) {
        expect.push_back(D.reduce(a));
    }
    sort_lex(expect);
    cd sum = 0.0;
    for (int j = 0; j < 7; ++j) {
        CHECK(std::abs(res.roots[j] - expect[j]) < 1e-9);
        sum += res.roots[j];
    }
    // Sum of zeros mod the lattice equals the first-moment prediction.
    CHECK(L.lattice_distance(sum - res.moment_sum) < 1e-8);
}

TEST_CASE("torus_roots with known poles")
{
    // theta_00(z)/theta_11(z): one zero at (1+tau)/2, one pole at 0.
    LatticeParams L(cd(0.0, 0.9));
    auto f = [&](cd z) { return theta(Char::c00, z, L) / theta(Char::c11, z, L); };
    TorusDomain D(1.0, L.tau(), cd(-0.3, -0.2));
    TorusRootOptions opts;
    opts.poles = {{0.0, 1}};
    auto res = torus_roots_detailed(f, D, opts);
    REQUIRE(res.roots.size() == 1);
    CHECK(std::abs(D.reduce(0.5 * (1.0 + L.tau())) - res.roots[0]) < 1e-10);

    opts.expected_count = 2;
    CHECK_THROWS_AS(torus_roots_detailed(f, D, opts), Error);
}
