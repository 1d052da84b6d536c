#include "laxkit/complex_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laxkit/errors.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit {

CMatrix kron(const CMatrix& A, const CMatrix& B)
{
    CMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return out;
}

static void require_same_square(const CMatrix& A, const CMatrix& B)
{
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
        fail(ErrorKind::DimensionMismatch, "operands must be square of equal size");
    }
}

CMatrix commutator(const CMatrix& A, const CMatrix& B)
{
    require_same_square(A, B);
    return A * B - B * A;
}

CMatrix anticommutator(const CMatrix& A, const CMatrix& B)
{
    require_same_square(A, B);
    return A * B + B * A;
}

CMatrix permutation_matrix(int N)
{
    if (N < 1) {
        fail(ErrorKind::DimensionMismatch, "permutation_matrix needs N >= 1");
    }
    CMatrix P = CMatrix::Zero(N * N, N * N);
    for (int i = 0; i < N; ++i) {
        for (int k = 0; k < N; ++k) {
            P(i * N + k, k * N + i) = 1.0;
        }
    }
    return P;
}

CMatrix pauli(int a)
{
    CMatrix s(2, 2);
    switch (a) {
    case 0: s << 1.0, 0.0, 0.0, 1.0; break;
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -kI, kI, 0.0; break;
    case 3: s << 1.0, 0.0, 0.0, -1.0; break;
    default: fail(ErrorKind::DimensionMismatch, "Pauli index must be 0..3");
    }
    return s;
}

cd det(const CMatrix& A)
{
    if (A.rows() != A.cols()) {
        fail(ErrorKind::DimensionMismatch, "det of a non-square matrix");
    }
    if (A.rows() == 0) {
        return 1.0;
    }
    if (A.rows() == 2) {
        return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    }
    return A.partialPivLu().determinant();
}

CMatrix inverse(const CMatrix& A, double floor)
{
    if (A.rows() != A.cols()) {
        fail(ErrorKind::DimensionMismatch, "inverse of a non-square matrix");
    }
    const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::PartialPivLU<CMatrix> lu(A);
    const double d = std::abs(lu.determinant());
    if (!(d > floor * std::pow(norm, double(A.rows())))) {
        fail(ErrorKind::Singular, "determinant below singularity floor");
    }
    return lu.inverse();
}

Eigen::VectorXd singular_values(const CMatrix& A)
{
    return Eigen::JacobiSVD<CMatrix>(A).singularValues();
}

void normalize_phase(CVector& v)
{
    Eigen::Index imax = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        // strict comparison keeps the first index among ties
        if (std::abs(v(i)) > std::abs(v(imax)) * (1.0 + 1e-12)) {
            imax = i;
        }
    }
    if (v.size() > 0 && std::abs(v(imax)) > 0.0) {
        v *= std::conj(v(imax)) / std::abs(v(imax));
    }
}

CVector kernel_vector(const CMatrix& A, double tol)
{
    if (A.cols() == 0) {
        fail(ErrorKind::DimensionMismatch, "kernel_vector of an empty matrix");
    }
    CMatrix M = A;
    if (M.rows() < M.cols()) {
        M.conservativeResize(M.cols(), Eigen::NoChange);
        M.bottomRows(A.cols() - A.rows()).setZero();
    }
    const Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    const Eigen::Index n = M.cols();
    const double smax = s(0);
    if (!(s(n - 1) <= tol * smax) && smax > 0.0) {
        fail(ErrorKind::NotRankDeficient,
             "smallest singular value ratio " + std::to_string(s(n - 1) / smax));
    }
    if (n >= 2 && (smax == 0.0 || s(n - 2) <= tol * smax)) {
        fail(ErrorKind::KernelDimensionTooLarge, "numerical kernel has dimension > 1");
    }
    CVector v = svd.matrixV().col(n - 1);
    v.normalize();
    normalize_phase(v);
    return v;
}

void sort_lex(std::vector<cd>& zs)
{
    std::sort(zs.begin(), zs.end(), [](cd a, cd b) {
        if (a.real() != b.real()) {
            return a.real() < b.real();
        }
        return a.imag() < b.imag();
    });
}

std::vector<cd> poly_roots(const std::vector<cd>& coeffs)
{
    if (coeffs.empty()) {
        fail(ErrorKind::DegenerateLeadingCoefficient, "empty coefficient list");
    }
    const int n = static_cast<int>(coeffs.size()) - 1;
    double cmax = 0.0;
    for (const cd& c : coeffs) {
        cmax = std::max(cmax, std::abs(c));
    }
    if (!(std::abs(coeffs.back()) > 1e-300) || std::abs(coeffs.back()) < 1e-14 * cmax) {
        fail(ErrorKind::DegenerateLeadingCoefficient, "leading coefficient vanishes");
    }
    if (n == 0) {
        return {};
    }
    CMatrix C = CMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        C(i, i - 1) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        C(i, n - 1) = -coeffs[i] / coeffs.back();
    }
    const Eigen::ComplexEigenSolver<CMatrix> es(C, false);
    std::vector<cd> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);

    auto eval = [&](cd z, cd& dp) {
        cd p = coeffs.back();
        dp = 0.0;
        for (int k = n - 1; k >= 0; --k) {
            dp = dp * z + p;
            p = p * z + coeffs[k];
        }
        return p;
    };
    for (cd& r : roots) {
        for (int it = 0; it < 20; ++it) {
            cd dp;
            const cd p = eval(r, dp);
            if (dp == cd(0.0) || p == cd(0.0)) {
                break;
            }
            const cd cand = r - p / dp;
            cd dummy;
            if (std::abs(eval(cand, dummy)) >= std::abs(p)) {
                break;
            }
            r = cand;
        }
    }
    // A tight cluster from a multiple root: its centroid is far better conditioned than
    // the individual eigenvalues. Keep it only if it does not raise the residual.
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        if (used[i]) {
            continue;
        }
        std::vector<int> members{i};
        for (int j = i + 1; j < n; ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < 1e-3 * (1.0 + std::abs(roots[i]))) {
                members.push_back(j);
            }
        }
        if (members.size() < 2) {
            continue;
        }
        cd centroid = 0.0;
        double worst = 0.0;
        for (int j : members) {
            cd dummy;
            centroid += roots[j];
            worst = std::max(worst, std::abs(eval(roots[j], dummy)));
        }
        centroid /= double(members.size());
        cd dummy;
        if (std::abs(eval(centroid, dummy)) <= 10.0 * worst) {
            for (int j : members) {
                roots[j] = centroid;
                used[j] = true;
            }
        }
    }
    sort_lex(roots);
    return roots;
}

CMatrix contour_residue(const std::function<CMatrix(cd)>& F, cd center, double radius, int nodes)
{
    CMatrix acc;
    for (int k = 0; k < nodes; ++k) {
        const cd e = std::exp(2.0 * kI * kPi * (double(k) / nodes));
        CMatrix v = F(center + radius * e) * (radius * e);
        if (k == 0) {
            acc = v;
        } else {
            acc += v;
        }
    }
    return acc / double(nodes);
}

cd contour_residue(const std::function<cd(cd)>& f, cd center, double radius, int nodes)
{
    cd acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const cd e = std::exp(2.0 * kI * kPi * (double(k) / nodes));
        acc += f(center + radius * e) * (radius * e);
    }
    return acc / double(nodes);
}

} // namespace laxkit
