#pragma once

#include <array>
#include <complex>

namespace laxkit {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cd kI{0.0, 1.0};

// Theta characteristics in Mumford's convention; 11 is the odd one.
enum class Char { c00, c01, c10, c11 };

struct ThetaConsts {
    cd c00; // theta_00(0)
    cd c01; // theta_01(0)
    cd c10; // theta_10(0)
    cd d11; // theta_11'(0)
    cd d3_11; // theta_11'''(0)
};

// Modulus plus cached theta constants for tau and 2 tau. Immutable after construction.
class LatticeParams {
public:
    static constexpr double kMinImTau = 0.05;
    static constexpr double kDefaultTol = 1e-15;

    explicit LatticeParams(cd tau, double trunc_tol = kDefaultTol);

    cd tau() const { return tau_; }
    double trunc_tol() const { return tol_; }
    const ThetaConsts& consts() const { return c_; }
    const ThetaConsts& consts_2tau() const { return c2_; }

    // Sigma prefactor: sigma(z) = theta_11(z) / theta_11'(0) * exp(eta1 z^2).
    cd eta1() const { return eta1_; }

    // Nearest lattice point m + n tau to z (in the lattice Z + tau Z).
    cd nearest_lattice_point(cd z) const;
    double lattice_distance(cd z) const { return std::abs(z - nearest_lattice_point(z)); }

private:
    cd tau_;
    double tol_;
    ThetaConsts c_;
    ThetaConsts c2_;
    cd eta1_;
};

// Raw series evaluation for an arbitrary modulus; used for the 2 tau gauge factors.
cd theta_tau(Char ch, cd z, cd tau, double tol = LatticeParams::kDefaultTol, int order = 0);

cd theta(Char ch, cd z, const LatticeParams& L);
cd theta_deriv(Char ch, cd z, const LatticeParams& L, int order);

cd phi(cd w, cd z, const LatticeParams& L);
// d/dz phi(w, z) = phi (E1(w+z) - E1(z)).
cd phi_dz(cd w, cd z, const LatticeParams& L);
cd e1(cd z, const LatticeParams& L);
cd sigma(cd z, const LatticeParams& L);
cd weierstrass_zeta(cd z, const LatticeParams& L);

struct RiemannResiduals {
    std::array<cd, 12> residual;
    std::array<double, 12> scale; // largest magnitude among the three products
};

// Six displayed relations at (u', v') followed by the same six at (v', u').
RiemannResiduals riemann_relation_residuals(cd up, cd vp, const LatticeParams& L);
RiemannResiduals riemann_relation_residuals(cd up, cd vp, const LatticeParams& L,
                                            const ThetaConsts& consts);

} // namespace laxkit
