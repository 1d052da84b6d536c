#include "laxkit/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laxkit/errors.hpp"

namespace laxkit {

namespace {

constexpr int kMaxTerms = 512;
constexpr int kMaxOrder = 3;
constexpr double kMaxExponent = 700.0;
constexpr double kMaxImRatio = 50.0;
constexpr double kPoleGuard = 1e-10;

using Derivs = std::array<cd, kMaxOrder + 1>;

void check_tau(cd tau)
{
    if (!(tau.imag() >= LatticeParams::kMinImTau)) {
        fail(ErrorKind::NonConvergent,
             "Im tau = " + std::to_string(tau.imag()) + " is below the floor 0.05");
    }
}

// Derivatives 0..order of the q-series at a reduced argument (|Im z| <= Im tau / 2).
Derivs series(Char ch, cd z, cd tau, double tol, int order)
{
    Derivs sum{};
    std::array<double, kMaxOrder + 1> largest{};
    const bool half = (ch == Char::c10 || ch == Char::c11);
    if (!half) {
        sum[0] = 1.0;
        largest[0] = 1.0;
    }
    for (int n = half ? 0 : 1; ; ++n) {
        if (n >= kMaxTerms) {
            fail(ErrorKind::NonConvergent, "theta series exceeded 512 terms");
        }
        const double m = half ? n + 0.5 : double(n);
        const double freq = 2.0 * kPi * m;
        const cd qpow = std::exp(kI * kPi * tau * (m * m));
        const double sign = ((ch == Char::c01 || ch == Char::c11) && (n % 2 == 1)) ? -1.0 : 1.0;
        bool done = n >= 2;
        double fpow = 1.0;
        for (int j = 0; j <= order; ++j) {
            const cd arg = freq * z + 0.5 * kPi * j;
            cd term = ch == Char::c11 ? -2.0 * sign * qpow * fpow * std::sin(arg)
                                      : 2.0 * sign * qpow * fpow * std::cos(arg);
            sum[j] += term;
            const double mag = std::abs(term);
            largest[j] = std::max(largest[j], mag);
            if (mag > tol * std::max(std::abs(sum[j]), largest[j])) {
                done = false;
            }
            fpow *= freq;
        }
        if (done) {
            break;
        }
    }
    return sum;
}

double binom(int k, int j)
{
    double r = 1.0;
    for (int i = 1; i <= j; ++i) {
        r = r * (k - j + i) / i;
    }
    return r;
}

cd nearest_point(cd z, cd tau)
{
    const double b0 = std::round(z.imag() / tau.imag());
    const double a0 = std::round((z - b0 * tau).real());
    cd best = a0 + b0 * tau;
    for (int db = -1; db <= 1; ++db) {
        for (int da = -1; da <= 1; ++da) {
            const cd p = (a0 + da) + (b0 + db) * tau;
            if (std::abs(z - p) < std::abs(z - best)) {
                best = p;
            }
        }
    }
    return best;
}

} // namespace

cd theta_tau(Char ch, cd z, cd tau, double tol, int order)
{
    check_tau(tau);
    if (order < 0 || order > kMaxOrder) {
        fail(ErrorKind::DimensionMismatch, "theta derivative order must be in 0..3");
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        fail(ErrorKind::Overflow, "non-finite theta argument");
    }
    if (std::abs(z.imag()) / tau.imag() > kMaxImRatio) {
        fail(ErrorKind::Overflow, "|Im z| / Im tau exceeds 50");
    }
    // z = z0 + a + b tau with |Im z0| <= Im tau / 2 and |Re z0| <= 1/2.
    const double b = std::round(z.imag() / tau.imag());
    const double a = std::round((z - b * tau).real());
    const cd z0 = z - a - b * tau;

    const cd expo = kI * kPi * (b * b) * tau - 2.0 * kI * kPi * b * z;
    if (expo.real() > kMaxExponent) {
        fail(ErrorKind::Overflow, "quasi-periodicity factor overflows");
    }
    const int alpha = (ch == Char::c10 || ch == Char::c11) ? 1 : 0;
    const int beta = (ch == Char::c01 || ch == Char::c11) ? 1 : 0;
    const long long parity = alpha * static_cast<long long>(a) + beta * static_cast<long long>(b);
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;

    const Derivs d = series(ch, z0, tau, tol, order);
    const cd shift = -2.0 * kI * kPi * b;
    cd acc = 0.0;
    cd spow = 1.0;
    for (int j = order; j >= 0; --j) {
        acc += binom(order, j) * spow * d[j];
        spow *= shift;
    }
    return sign * std::exp(expo) * acc;
}

LatticeParams::LatticeParams(cd tau, double trunc_tol) : tau_(tau), tol_(trunc_tol)
{
    check_tau(tau);
    if (!(trunc_tol > 0.0) || trunc_tol >= 1.0) {
        fail(ErrorKind::InvariantViolation, "trunc_tol must lie in (0, 1)");
    }
    auto fill = [&](cd t) {
        ThetaConsts c;
        c.c00 = theta_tau(Char::c00, 0.0, t, tol_);
        c.c01 = theta_tau(Char::c01, 0.0, t, tol_);
        c.c10 = theta_tau(Char::c10, 0.0, t, tol_);
        c.d11 = theta_tau(Char::c11, 0.0, t, tol_, 1);
        c.d3_11 = theta_tau(Char::c11, 0.0, t, tol_, 3);
        return c;
    };
    c_ = fill(tau);
    c2_ = fill(2.0 * tau);
    eta1_ = -c_.d3_11 / (6.0 * c_.d11);
}

cd LatticeParams::nearest_lattice_point(cd z) const
{
    return nearest_point(z, tau_);
}

cd theta(Char ch, cd z, const LatticeParams& L)
{
    return theta_tau(ch, z, L.tau(), L.trunc_tol(), 0);
}

cd theta_deriv(Char ch, cd z, const LatticeParams& L, int order)
{
    if (order < 1 || order > kMaxOrder) {
        fail(ErrorKind::DimensionMismatch, "theta_deriv order must be in 1..3");
    }
    return theta_tau(ch, z, L.tau(), L.trunc_tol(), order);
}

cd phi(cd w, cd z, const LatticeParams& L)
{
    if (L.lattice_distance(w) < kPoleGuard || L.lattice_distance(z) < kPoleGuard) {
        fail(ErrorKind::PoleAtArgument, "phi evaluated at a lattice point");
    }
    return theta(Char::c11, w + z, L) * L.consts().d11 /
           (theta(Char::c11, w, L) * theta(Char::c11, z, L));
}

cd e1(cd z, const LatticeParams& L)
{
    if (L.lattice_distance(z) < kPoleGuard) {
        fail(ErrorKind::PoleAtArgument, "E1 evaluated at a lattice point");
    }
    return theta_deriv(Char::c11, z, L, 1) / theta(Char::c11, z, L);
}

cd phi_dz(cd w, cd z, const LatticeParams& L)
{
    const cd p = phi(w, z, L);
    if (L.lattice_distance(w + z) < kPoleGuard) {
        // phi vanishes here; differentiate the numerator directly.
        return theta_deriv(Char::c11, w + z, L, 1) * L.consts().d11 /
               (theta(Char::c11, w, L) * theta(Char::c11, z, L));
    }
    return p * (e1(w + z, L) - e1(z, L));
}

cd sigma(cd z, const LatticeParams& L)
{
    const cd expo = L.eta1() * z * z;
    if (expo.real() > kMaxExponent) {
        fail(ErrorKind::Overflow, "sigma prefactor overflows");
    }
    return theta(Char::c11, z, L) / L.consts().d11 * std::exp(expo);
}

cd weierstrass_zeta(cd z, const LatticeParams& L)
{
    return e1(z, L) + 2.0 * L.eta1() * z;
}

RiemannResiduals riemann_relation_residuals(cd up, cd vp, const LatticeParams& L)
{
    return riemann_relation_residuals(up, vp, L, L.consts());
}

RiemannResiduals riemann_relation_residuals(cd up, cd vp, const LatticeParams& L,
                                            const ThetaConsts& k)
{
    RiemannResiduals out{};
    for (int pass = 0; pass < 2; ++pass) {
        const cd u = pass == 0 ? up : vp;
        const cd v = pass == 0 ? vp : up;
        const cd w = u - v;
        auto T = [&](Char c, cd x) { return theta(c, x, L); };
        using C = Char;
        const cd t[6][3] = {
            {k.c01 * T(C::c01, u) * T(C::c10, v) * T(C::c10, w),
             k.c10 * T(C::c10, u) * T(C::c01, v) * T(C::c01, w),
             k.c00 * T(C::c00, u) * T(C::c11, v) * T(C::c11, w)},
            {k.c00 * T(C::c10, u) * T(C::c00, v) * T(C::c10, w),
             k.c10 * T(C::c00, u) * T(C::c10, v) * T(C::c00, w),
             -k.c01 * T(C::c11, u) * T(C::c01, v) * T(C::c11, w)},
            {k.c01 * T(C::c01, u) * T(C::c00, v) * T(C::c00, w),
             k.c00 * T(C::c00, u) * T(C::c01, v) * T(C::c01, w),
             k.c10 * T(C::c10, u) * T(C::c11, v) * T(C::c11, w)},
            {k.c00 * T(C::c11, u) * T(C::c01, v) * T(C::c10, w),
             k.c10 * T(C::c01, u) * T(C::c11, v) * T(C::c00, w),
             k.c01 * T(C::c10, u) * T(C::c00, v) * T(C::c11, w)},
            {k.c01 * T(C::c11, u) * T(C::c00, v) * T(C::c10, w),
             k.c10 * T(C::c00, u) * T(C::c11, v) * T(C::c01, w),
             k.c00 * T(C::c10, u) * T(C::c01, v) * T(C::c11, w)},
            {k.c01 * T(C::c11, u) * T(C::c10, v) * T(C::c00, w),
             k.c10 * T(C::c00, u) * T(C::c01, v) * T(C::c11, w),
             k.c00 * T(C::c10, u) * T(C::c11, v) * T(C::c01, w)},
        };
        for (int r = 0; r < 6; ++r) {
            const int idx = pass * 6 + r;
            out.residual[idx] = t[r][0] - t[r][1] - t[r][2];
            out.scale[idx] = std::max({std::abs(t[r][0]), std::abs(t[r][1]), std::abs(t[r][2])});
        }
    }
    return out;
}

} // namespace laxkit
