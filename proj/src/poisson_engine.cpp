#include "laxkit/poisson_engine.hpp"

#include <algorithm>
#include <cmath>

#include "laxkit/errors.hpp"

namespace laxkit {

CMatrix PoissonStructure::eval(const CVector& x) const
{
    if (x.size() != dim()) {
        fail(ErrorKind::DimensionMismatch, "coordinate vector length differs from structure");
    }
    CMatrix p = pi(x);
    if (p.rows() != dim() || p.cols() != dim()) {
        fail(ErrorKind::DimensionMismatch, "structure matrix has the wrong shape");
    }
    const double scale = p.cwiseAbs().maxCoeff();
    if ((p + p.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale) {
        fail(ErrorKind::InvariantViolation, "structure matrix is not antisymmetric");
    }
    return p;
}

cd bracket_scalar(const PoissonStructure& P, const CVector& grad_f, const CVector& grad_g,
                  const CVector& x)
{
    if (grad_f.size() != P.dim() || grad_g.size() != P.dim()) {
        fail(ErrorKind::DimensionMismatch, "gradient length differs from coordinate count");
    }
    return grad_f.transpose() * P.eval(x) * grad_g;
}

double bracket_normalized(const PoissonStructure& P, const CVector& grad_f,
                          const CVector& grad_g, const CVector& x)
{
    if (grad_f.size() != P.dim() || grad_g.size() != P.dim()) {
        fail(ErrorKind::DimensionMismatch, "gradient length differs from coordinate count");
    }
    const CMatrix p = P.eval(x);
    cd total = 0.0;
    double scale = 0.0;
    for (int a = 0; a < P.dim(); ++a) {
        for (int b = 0; b < P.dim(); ++b) {
            const cd t = grad_f(a) * p(a, b) * grad_g(b);
            total += t;
            scale = std::max(scale, std::abs(t));
        }
    }
    return scale == 0.0 ? 0.0 : std::abs(total) / scale;
}

double jacobi_residual(const PoissonStructure& P, const CVector& x)
{
    const int n = P.dim();
    const CMatrix p = P.eval(x);
    const double h = 1e-6 * (1.0 + x.norm());
    std::vector<CMatrix> dp(n);
    for (int mu = 0; mu < n; ++mu) {
        CVector xp = x;
        CVector xm = x;
        xp(mu) += h;
        xm(mu) -= h;
        dp[mu] = (P.pi(xp) - P.pi(xm)) / (2.0 * h);
    }
    double worst = 0.0;
    double scale = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            for (int c = b + 1; c < n; ++c) {
                const int cyc[3][3] = {{a, b, c}, {b, c, a}, {c, a, b}};
                cd sum = 0.0;
                for (const auto& t : cyc) {
                    for (int mu = 0; mu < n; ++mu) {
                        const cd term = p(mu, t[0]) * dp[mu](t[1], t[2]);
                        sum += term;
                        scale = std::max(scale, std::abs(term));
                    }
                }
                worst = std::max(worst, std::abs(sum));
            }
        }
    }
    // Every term vanishes for structures with constant coefficients.
    return scale == 0.0 ? 0.0 : worst / scale;
}

double casimir_residual(const PoissonStructure& P, const CVector& grad_c, const CVector& x)
{
    if (grad_c.size() != P.dim()) {
        fail(ErrorKind::DimensionMismatch, "gradient length differs from coordinate count");
    }
    const CMatrix p = P.eval(x);
    double worst = 0.0;
    double scale = 0.0;
    for (int a = 0; a < P.dim(); ++a) {
        cd sum = 0.0;
        for (int mu = 0; mu < P.dim(); ++mu) {
            const cd term = grad_c(mu) * p(mu, a);
            sum += term;
            scale = std::max(scale, std::abs(term));
        }
        worst = std::max(worst, std::abs(sum));
    }
    return scale == 0.0 ? 0.0 : worst / scale;
}

CMatrix tensor_bracket(const CMatrix& pi, const std::vector<CMatrix>& J1,
                       const std::vector<CMatrix>& J2)
{
    const auto n = static_cast<Eigen::Index>(J1.size());
    if (static_cast<Eigen::Index>(J2.size()) != n || pi.rows() != n || pi.cols() != n || n == 0) {
        fail(ErrorKind::DimensionMismatch, "Jacobian count differs from coordinate count");
    }
    const auto N = J1[0].rows();
    CMatrix M = CMatrix::Zero(N * N, N * N);
    for (Eigen::Index b = 0; b < n; ++b) {
        CMatrix left = CMatrix::Zero(N, N);
        bool any = false;
        for (Eigen::Index a = 0; a < n; ++a) {
            if (pi(a, b) != cd(0.0)) {
                left += pi(a, b) * J1[a];
                any = true;
            }
        }
        if (any) {
            M += kron(left, J2[b]);
        }
    }
    return M;
}

CMatrix tensor_bracket(const PoissonStructure& P, const MatrixFamily& F, const CVector& x,
                       cd w1, cd w2)
{
    const auto J1 = F.jac(x, w1);
    const auto J2 = F.jac(x, w2);
    if (static_cast<int>(J1.size()) != P.dim()) {
        fail(ErrorKind::DimensionMismatch, "family coordinates differ from structure");
    }
    return tensor_bracket(P.eval(x), J1, J2);
}

PoissonStructure direct_sum(const std::vector<PoissonStructure>& parts)
{
    PoissonStructure out;
    std::vector<int> offsets;
    int total = 0;
    for (const auto& p : parts) {
        offsets.push_back(total);
        total += p.dim();
        out.coord_names.insert(out.coord_names.end(), p.coord_names.begin(), p.coord_names.end());
    }
    out.pi = [parts, offsets, total](const CVector& x) {
        CMatrix m = CMatrix::Zero(total, total);
        for (std::size_t k = 0; k < parts.size(); ++k) {
            const int d = parts[k].dim();
            m.block(offsets[k], offsets[k], d, d) = parts[k].pi(x.segment(offsets[k], d));
        }
        return m;
    };
    return out;
}

double jacobian_consistency(const MatrixFamily& F, const CVector& x, cd z, double h)
{
    const auto J = F.jac(x, z);
    double worst = 0.0;
    for (Eigen::Index a = 0; a < x.size(); ++a) {
        CVector xp = x;
        CVector xm = x;
        xp(a) += h;
        xm(a) -= h;
        const CMatrix fd = (F.eval(xp, z) - F.eval(xm, z)) / (2.0 * h);
        const double scale = std::max({fd.cwiseAbs().maxCoeff(), J[a].cwiseAbs().maxCoeff(),
                                       F.eval(x, z).cwiseAbs().maxCoeff() * 1e-3});
        if (scale > 0.0) {
            worst = std::max(worst, (fd - J[a]).cwiseAbs().maxCoeff() / scale);
        }
    }
    return worst;
}

} // namespace laxkit
