#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace laxkit {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// (A (x) B)_{(ik),(jl)} = A_ij B_kl with row index i*N + k.
CMatrix kron(const CMatrix& A, const CMatrix& B);
CMatrix commutator(const CMatrix& A, const CMatrix& B);
CMatrix anticommutator(const CMatrix& A, const CMatrix& B);

// P_{(ik),(jl)} = delta_il delta_kj.
CMatrix permutation_matrix(int N);

// sigma_0 = I, sigma_1, sigma_2, sigma_3.
CMatrix pauli(int a);

cd det(const CMatrix& A);
CMatrix inverse(const CMatrix& A, double floor = 1e-13);

// Unit kernel vector of a matrix with numerical nullity exactly one. The largest-modulus
// component is made real positive.
CVector kernel_vector(const CMatrix& A, double tol = 1e-10);
void normalize_phase(CVector& v);

// Singular values in descending order.
Eigen::VectorXd singular_values(const CMatrix& A);

// Roots of sum_k coeffs[k] z^k, sorted lexicographically by (Re, Im).
std::vector<cd> poly_roots(const std::vector<cd>& coeffs);

void sort_lex(std::vector<cd>& zs);

// Contour estimate of (1 / 2 pi i) oint F dz on a circle.
CMatrix contour_residue(const std::function<CMatrix(cd)>& F, cd center, double radius,
                        int nodes = 64);
cd contour_residue(const std::function<cd(cd)>& f, cd center, double radius, int nodes = 64);

// Fundamental parallelogram origin + a omega1 + b omega2, a, b in [0, 1).
struct TorusDomain {
    cd omega1;
    cd omega2;
    cd origin{0.0, 0.0};

    TorusDomain(cd w1, cd w2, cd o = 0.0);
    // Representative of z inside the parallelogram.
    cd reduce(cd z) const;
    // Real coordinates (a, b) with z - origin = a omega1 + b omega2.
    std::pair<double, double> coords(cd z) const;
};

struct KnownPole {
    cd z;
    int multiplicity = 1;
};

struct TorusRootOptions {
    std::optional<int> expected_count;
    // Poles of f modulo the periods of the domain.
    std::vector<KnownPole> poles;
    // Analytic derivative; a five-point stencil is used when empty.
    std::function<cd(cd)> df;
    std::uint64_t seed = 0x6c61786bULL;
};

struct TorusRootResult {
    std::vector<cd> roots;  // reduced into the domain, sorted lexicographically
    int count = 0;          // argument-principle zero count
    cd moment_sum{0.0, 0.0}; // first zero moment over the (offset) cell
};

TorusRootResult torus_roots_detailed(const std::function<cd(cd)>& f, const TorusDomain& D,
                                     const TorusRootOptions& opts = {});
std::vector<cd> torus_roots(const std::function<cd(cd)>& f, const TorusDomain& D,
                            std::optional<int> expected_count = std::nullopt);

} // namespace laxkit
