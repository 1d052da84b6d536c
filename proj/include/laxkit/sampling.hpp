#pragma once

// Seeded random draws of moduli, points and model data. One Sampler per independent stream.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/elliptic_chain.hpp"
#include "laxkit/rational_lax.hpp"
#include "laxkit/sklyanin.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    cd complex_box(double re, double im) { return {uniform(-re, re), uniform(-im, im)}; }
    cd gaussian()
    {
        std::normal_distribution<double> n(0.0, 1.0);
        return {n(rng_), n(rng_)};
    }
    CMatrix gaussian_matrix(int r, int c)
    {
        CMatrix M(r, c);
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) {
                M(i, j) = gaussian();
            }
        }
        return M;
    }
    CVector gaussian_vector(int n) { return gaussian_matrix(n, 1).col(0); }
    // Modulus with Re in [-0.5, 0.5] and Im in [lo, hi].
    cd tau(double lo = 0.5, double hi = 2.0) { return {uniform(-0.5, 0.5), uniform(lo, hi)}; }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Random additive data: distinct diagonal L0, poles in a box, Gaussian residue vectors.
inline RationalAdditive random_additive(Sampler& rng, int N, int d)
{
    RationalAdditive rep;
    rep.L0 = CMatrix::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        rep.L0(i, i) = rng.gaussian() + cd(0.5 * i, 0.0);
    }
    for (int i = 0; i < d; ++i) {
        rep.poles.push_back({rng.complex_box(2.0, 2.0), rng.gaussian_vector(N), rng.gaussian_vector(N)});
    }
    return rep;
}

inline RationalMultiplicative random_multiplicative(Sampler& rng, int N, int d)
{
    RationalMultiplicative m;
    m.L0 = random_additive(rng, N, 0).L0;
    for (int i = 0; i < d; ++i) {
        m.factors.push_back({rng.complex_box(2.0, 2.0), rng.gaussian_vector(N), rng.gaussian_vector(N)});
    }
    return m;
}

// Point a + b tau with a, b in [lo, hi].
inline cd cell_point(Sampler& rng, cd tau, double lo = 0.05, double hi = 0.95)
{
    return rng.uniform(lo, hi) + rng.uniform(lo, hi) * tau;
}

// Gaussian pole data with the residue traces shifted to sum to zero.
inline MultiPoleSklyanin random_multipole(Sampler& rng, const LatticeParams& L, int d)
{
    MultiPoleSklyanin mp{rng.gaussian(), {}, L};
    cd sum = 0.0;
    for (int j = 0; j < d; ++j) {
        MultiPole p{cell_point(rng, L.tau()), {rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian()}};
        sum += p.s[0];
        mp.poles.push_back(p);
    }
    for (MultiPole& p : mp.poles) {
        p.s[0] -= sum / static_cast<double>(d);
    }
    return mp;
}

// Tyurin data with q rows in a small box so that all sigma arguments stay generic.
inline TyurinChain random_tyurin(Sampler& rng, const LatticeParams& L, int N, int d)
{
    TyurinChain ch{{}, {}, {}, L};
    for (int m = 0; m < d; ++m) {
        std::vector<cd> q, f;
        for (int i = 0; i < N; ++i) {
            q.push_back(rng.complex_box(0.4, 0.3));
            f.push_back(rng.complex_box(0.4, 0.3) + 1.0);
        }
        ch.q.push_back(q);
        ch.f.push_back(f);
        ch.z.push_back(rng.complex_box(0.4, 0.3));
    }
    return ch;
}

// |s_k| in [0.5, 1.5] with uniform phase. The cubic Jacobiator under a perturbed quartic
// scales like s0^3, so states are kept off the coordinate hyperplanes.
inline SklyaninCoords random_sklyanin(Sampler& rng, const LatticeParams& L)
{
    std::array<cd, 4> s;
    for (cd& v : s) {
        v = std::polar(rng.uniform(0.5, 1.5), rng.uniform(-kPi, kPi));
    }
    return {rng.complex_box(0.5, 0.3), s, L};
}

inline double max_abs(const CMatrix& M) { return M.cwiseAbs().maxCoeff(); }

inline double rel_diff(const CMatrix& A, const CMatrix& B)
{
    const double s = std::max(max_abs(A), max_abs(B));
    return s == 0.0 ? 0.0 : max_abs(A - B) / s;
}

} // namespace laxkit
