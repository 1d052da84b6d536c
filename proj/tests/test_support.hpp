#pragma once

// Independent oracles and sampling helpers shared by the unit tests.

#include <cmath>
#include <complex>
#include <random>

#include "laxkit/complex_linalg.hpp"
#include "laxkit/elliptic_chain.hpp"
#include "laxkit/rational_lax.hpp"
#include "laxkit/sampling.hpp"
#include "laxkit/special_functions.hpp"

namespace laxkit::testing {

using laxkit::cell_point;
using laxkit::max_abs;
using laxkit::random_additive;
using laxkit::random_multiplicative;
using laxkit::random_multipole;
using laxkit::random_tyurin;
using laxkit::rel_diff;
using laxkit::Sampler;

// Direct two-sided exponential sum, no argument reduction:
// theta_ab(z) = sum_n exp(pi i (n + a/2)^2 tau + 2 pi i (n + a/2)(z + b/2)).
inline cd theta_direct(Char ch, cd z, cd tau, int order = 0)
{
    const double a = (ch == Char::c10 || ch == Char::c11) ? 0.5 : 0.0;
    const double b = (ch == Char::c01 || ch == Char::c11) ? 0.5 : 0.0;
    cd s = 0.0;
    for (int n = -60; n <= 60; ++n) {
        const double m = n + a;
        s += std::pow(2.0 * kI * kPi * m, order) *
             std::exp(kI * kPi * m * m * tau + 2.0 * kI * kPi * m * (z + b));
    }
    return s;
}

} // namespace laxkit::testing
