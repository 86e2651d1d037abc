// SPDX-License-Identifier: Apache-2.0
//
// Special functions not covered by Boost.Math in the form needed here.

#ifndef FDADM_SPECIAL_HPP
#define FDADM_SPECIAL_HPP

#include <complex>

namespace fdadm::special
{
    // log of the Hobson associated Legendre function P_nu^{-n}(z), z > 1 (z = 1 allowed),
    // integer n >= 0, real nu > -1. The function is positive in this range.
    double log_legendre_p_neg(double nu, int n, double z);

    // Hobson P_nu^mu(z), z >= 1, integer mu, real nu > -1 with nu - mu + 1 > 0 for mu > 0.
    double legendre_p_hobson(double nu, int mu, double z);

    // Cut-continued ("type 2") P_nu^mu(z) on z > 1: exp(-i pi mu / 2) times the Hobson value.
    std::complex<double> legendre_p_type2(double nu, int mu, double z);

    // log of 2F1(a, b; c; x) for 0 <= x < 1, c > 0, when the series sum is positive.
    // Stopping assumes the term ratio never climbs back above 1 once below it, which holds
    // for the Legendre parameters a = -nu, b = n - nu, c = n + 1.
    // Terms are accumulated with a running exponent so very large sums do not overflow.
    double log_hyp2f1_positive(double a, double b, double c, double x);

    // e^v E_{n}(v) for integer n >= 1, v > 0.
    double scaled_expint(int n, double v);
}

#endif
