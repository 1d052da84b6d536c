#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/errors.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit {

TorusDomain::TorusDomain(cd w1, cd w2, cd o) : omega1(w1), omega2(w2), origin(o)
{
    if (!(std::abs((w2 / w1).imag()) > 1e-6)) {
        fail(ErrorKind::InvariantViolation, "torus periods are not independent over R");
    }
}

std::pair<double, double> TorusDomain::coords(cd z) const
{
    const cd d = z - origin;
    // Solve d = a w1 + b w2 over the reals.
    const double det = omega1.real() * omega2.imag() - omega1.imag() * omega2.real();
    const double a = (d.real() * omega2.imag() - d.imag() * omega2.real()) / det;
    const double b = (omega1.real() * d.imag() - omega1.imag() * d.real()) / det;
    return {a, b};
}

cd TorusDomain::reduce(cd z) const
{
    auto [a, b] = coords(z);
    cd r = z - std::floor(a) * omega1 - std::floor(b) * omega2;
    // Guard the upper edges against rounding.
    auto [a2, b2] = coords(r);
    if (a2 >= 1.0) {
        r -= omega1;
    }
    if (b2 >= 1.0) {
        r -= omega2;
    }
    return r;
}

namespace {

constexpr int kMoments = 5;
constexpr int kMaxRootsPerCell = 4;
constexpr int kMaxDepth = 12;
constexpr int kOffsetAttempts = 4;
constexpr double kBoundaryGap = 1e-6;

using Moments = std::array<cd, kMoments>;

// Retry signal for boundary trouble; converted to BoundaryTooClose after re-offsets.
struct BoundaryIssue {
    std::string what;
};

struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussLegendre(int n)
    {
        // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            const double b = i / std::sqrt(4.0 * i * i - 1.0);
            J(i, i - 1) = b;
            J(i - 1, i) = b;
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        for (int i = 0; i < n; ++i) {
            x.push_back(es.eigenvalues()(i));
            const double v = es.eigenvectors()(0, i);
            w.push_back(2.0 * v * v);
        }
    }
};

const GaussLegendre& gl16()
{
    static const GaussLegendre rule(16);
    return rule;
}

struct Region {
    cd origin;
    cd e1;
    cd e2;

    cd center() const { return origin + 0.5 * (e1 + e2); }
    double radius() const { return 0.5 * std::max(std::abs(e1 + e2), std::abs(e1 - e2)); }

    std::pair<double, double> coords(cd z) const
    {
        const cd d = z - origin;
        const double det = e1.real() * e2.imag() - e1.imag() * e2.real();
        return {(d.real() * e2.imag() - d.imag() * e2.real()) / det,
                (e1.real() * d.imag() - e1.imag() * d.real()) / det};
    }

    bool contains(cd z, double slack = 0.0) const
    {
        auto [a, b] = coords(z);
        return a >= -slack && a < 1.0 + slack && b >= -slack && b < 1.0 + slack;
    }

    // Distance from z to the boundary, in units of the shorter edge.
    double boundary_gap(cd z) const
    {
        auto [a, b] = coords(z);
        const double h1 = std::abs(e1) * std::abs(std::sin(std::arg(e2 / e1)));
        const double h2 = std::abs(e2) * std::abs(std::sin(std::arg(e2 / e1)));
        return std::min({std::abs(a) * h2, std::abs(1.0 - a) * h2, std::abs(b) * h1,
                         std::abs(1.0 - b) * h1}) /
               std::min(std::abs(e1), std::abs(e2));
    }
};

class Finder {
public:
    Finder(const std::function<cd(cd)>& f, const TorusDomain& D, const TorusRootOptions& opts)
        : f_(f), D_(D), opts_(opts)
    {
        h_ = 2e-4 * std::min(std::abs(D.omega1), std::abs(D.omega2));
    }

    cd deriv(cd z) const
    {
        if (opts_.df) {
            return opts_.df(z);
        }
        return (-f_(z + 2.0 * h_) + 8.0 * f_(z + h_) - 8.0 * f_(z - h_) + f_(z - 2.0 * h_)) /
               (12.0 * h_);
    }

    // Poles (with multiplicity) of f inside the region.
    std::vector<KnownPole> poles_in(const Region& R) const
    {
        std::vector<KnownPole> out;
        for (const KnownPole& p : opts_.poles) {
            const cd base = D_.reduce(p.z);
            for (int m = -2; m <= 2; ++m) {
                for (int n = -2; n <= 2; ++n) {
                    const cd z = base + double(m) * D_.omega1 + double(n) * D_.omega2;
                    if (R.contains(z, 1e-3)) {
                        if (R.boundary_gap(z) < kBoundaryGap) {
                            throw BoundaryIssue{"known pole on the contour"};
                        }
                        if (R.contains(z)) {
                            out.push_back({z, p.multiplicity});
                        }
                    }
                }
            }
        }
        return out;
    }

    // (1 / 2 pi i) oint w^k f'/f dz with w = (z - c) / rho.
    Moments edge(cd a, cd b, cd c, double rho) const
    {
        Moments total{};
        const int panels = 4;
        for (int p = 0; p < panels; ++p) {
            const cd pa = a + (b - a) * (double(p) / panels);
            const cd pb = a + (b - a) * (double(p + 1) / panels);
            const Moments m = adaptive(pa, pb, c, rho, panel(pa, pb, c, rho), 0);
            for (int k = 0; k < kMoments; ++k) {
                total[k] += m[k];
            }
        }
        return total;
    }

    Moments contour(const Region& R, cd c, double rho) const
    {
        const cd z0 = R.origin;
        const cd z1 = R.origin + R.e1;
        const cd z2 = R.origin + R.e1 + R.e2;
        const cd z3 = R.origin + R.e2;
        Moments total{};
        for (const auto& [a, b] : {std::pair{z0, z1}, std::pair{z1, z2}, std::pair{z2, z3},
                                   std::pair{z3, z0}}) {
            const Moments m = edge(a, b, c, rho);
            for (int k = 0; k < kMoments; ++k) {
                total[k] += m[k];
            }
        }
        for (cd& m : total) {
            m /= 2.0 * kI * kPi;
        }
        return total;
    }

    // Zeros inside R, appended to out.
    void solve(const Region& R, int depth, std::vector<cd>& out, cd* moment_sum = nullptr) const
    {
        const cd c = R.center();
        const double rho = R.radius();
        Moments m = contour(R, c, rho);
        for (const KnownPole& p : poles_in(R)) {
            cd w = 1.0;
            for (int k = 0; k < kMoments; ++k) {
                m[k] += double(p.multiplicity) * w;
                w *= (p.z - c) / rho;
            }
        }
        if (moment_sum) {
            *moment_sum = c * m[0] + rho * m[1];
        }
        const double count_real = m[0].real();
        const int n = static_cast<int>(std::lround(count_real));
        if (std::abs(count_real - n) > 0.05 || std::abs(m[0].imag()) > 0.05 || n < 0) {
            throw BoundaryIssue{"non-integral argument-principle count " +
                                std::to_string(count_real)};
        }
        if (n == 0) {
            return;
        }
        if (n <= kMaxRootsPerCell) {
            std::vector<cd> found;
            if (roots_from_moments(R, m, n, c, rho, found)) {
                out.insert(out.end(), found.begin(), found.end());
                return;
            }
        }
        if (depth >= kMaxDepth) {
            fail(ErrorKind::CountMismatch, "root search reached the depth cap");
        }
        // Slightly off-centre split avoids symmetric coincidences.
        const double s = 0.4871;
        const double t = 0.5137;
        const cd a1 = R.e1 * s;
        const cd a2 = R.e1 * (1.0 - s);
        const cd b1 = R.e2 * t;
        const cd b2 = R.e2 * (1.0 - t);
        const std::size_t before = out.size();
        solve({R.origin, a1, b1}, depth + 1, out);
        solve({R.origin + a1, a2, b1}, depth + 1, out);
        solve({R.origin + b1, a1, b2}, depth + 1, out);
        solve({R.origin + a1 + b1, a2, b2}, depth + 1, out);
        if (out.size() - before != static_cast<std::size_t>(n)) {
            throw BoundaryIssue{"sub-cell counts do not add up"};
        }
    }

private:
    Moments panel(cd a, cd b, cd c, double rho) const
    {
        const GaussLegendre& g = gl16();
        const cd half = 0.5 * (b - a);
        const cd mid = 0.5 * (a + b);
        Moments out{};
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            const cd z = mid + half * g.x[i];
            const cd fz = f_(z);
            if (!(std::abs(fz) > 0.0) || !std::isfinite(std::abs(fz))) {
                throw BoundaryIssue{"f vanishes or is singular on the contour"};
            }
            const cd v = deriv(z) / fz * half * g.w[i];
            const cd w = (z - c) / rho;
            cd wk = 1.0;
            for (int k = 0; k < kMoments; ++k) {
                out[k] += wk * v;
                wk *= w;
            }
        }
        return out;
    }

    Moments adaptive(cd a, cd b, cd c, double rho, const Moments& whole, int depth) const
    {
        const cd mid = 0.5 * (a + b);
        const Moments left = panel(a, mid, c, rho);
        const Moments right = panel(mid, b, c, rho);
        Moments sum{};
        double err = 0.0;
        for (int k = 0; k < kMoments; ++k) {
            sum[k] = left[k] + right[k];
            err = std::max(err, std::abs(sum[k] - whole[k]));
        }
        if (err < 1e-11) {
            return sum;
        }
        if (depth > 30) {
            throw BoundaryIssue{"contour quadrature did not converge"};
        }
        const Moments l = adaptive(a, mid, c, rho, left, depth + 1);
        const Moments r = adaptive(mid, b, c, rho, right, depth + 1);
        for (int k = 0; k < kMoments; ++k) {
            sum[k] = l[k] + r[k];
        }
        return sum;
    }

    bool newton(cd& z, const Region& R) const
    {
        const double size = std::min(std::abs(R.e1), std::abs(R.e2));
        for (int it = 0; it < 60; ++it) {
            const cd fz = f_(z);
            if (fz == cd(0.0)) {
                return true;
            }
            const cd d = deriv(z);
            if (d == cd(0.0)) {
                return false;
            }
            const cd step = fz / d;
            z -= step;
            if (!std::isfinite(std::abs(z))) {
                return false;
            }
            if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) {
                return true;
            }
            if (std::abs(step) > 4.0 * size) {
                return false;
            }
        }
        return false;
    }

    bool roots_from_moments(const Region& R, const Moments& m, int n, cd c, double rho,
                            std::vector<cd>& found) const
    {
        // Newton identities: power sums -> elementary symmetric polynomials.
        std::vector<cd> e(n + 1);
        e[0] = 1.0;
        for (int k = 1; k <= n; ++k) {
            cd acc = 0.0;
            for (int i = 1; i <= k; ++i) {
                acc += (i % 2 == 1 ? 1.0 : -1.0) * e[k - i] * m[i];
            }
            e[k] = acc / double(k);
        }
        std::vector<cd> coeffs(n + 1);
        for (int k = 0; k <= n; ++k) {
            coeffs[n - k] = (k % 2 == 0 ? 1.0 : -1.0) * e[k];
        }
        std::vector<cd> ws = poly_roots(coeffs);
        const double size = std::min(std::abs(R.e1), std::abs(R.e2));
        for (cd w : ws) {
            cd z = c + rho * w;
            if (!newton(z, R) || !R.contains(z, 1e-9)) {
                return false;
            }
            for (cd other : found) {
                if (std::abs(other - z) < 1e-8 * size) {
                    return false;
                }
            }
            found.push_back(z);
        }
        return true;
    }

    const std::function<cd(cd)>& f_;
    const TorusDomain& D_;
    const TorusRootOptions& opts_;
    double h_;
};

} // namespace

TorusRootResult torus_roots_detailed(const std::function<cd(cd)>& f, const TorusDomain& D,
                                     const TorusRootOptions& opts)
{
    Finder finder(f, D, opts);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::string last;
    for (int attempt = 0; attempt < kOffsetAttempts; ++attempt) {
        const cd shift = attempt == 0 ? cd(0.0137, 0.0) * D.omega1 + 0.0213 * D.omega2
                                      : jitter(rng) * D.omega1 + jitter(rng) * D.omega2;
        const Region cell{D.origin + shift, D.omega1, D.omega2};
        try {
            std::vector<cd> raw;
            TorusRootResult res;
            finder.solve(cell, 0, raw, &res.moment_sum);
            for (cd z : raw) {
                if (cell.boundary_gap(z) < kBoundaryGap) {
                    throw BoundaryIssue{"zero within 1e-6 of the contour"};
                }
            }
            res.count = static_cast<int>(raw.size());
            for (cd z : raw) {
                res.roots.push_back(D.reduce(z));
            }
            sort_lex(res.roots);
            if (opts.expected_count && *opts.expected_count != res.count) {
                fail(ErrorKind::CountMismatch,
                     "expected " + std::to_string(*opts.expected_count) + " zeros, found " +
                         std::to_string(res.count));
            }
            return res;
        } catch (const BoundaryIssue& b) {
            last = b.what;
        }
    }
    fail(ErrorKind::BoundaryTooClose, last);
}

std::vector<cd> torus_roots(const std::function<cd(cd)>& f, const TorusDomain& D,
                            std::optional<int> expected_count)
{
    TorusRootOptions opts;
    opts.expected_count = expected_count;
    return torus_roots_detailed(f, D, opts).roots;
}

} // namespace laxkit
