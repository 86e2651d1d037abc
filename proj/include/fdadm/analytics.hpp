// SPDX-License-Identifier: Apache-2.0
//
// BER, average secrecy rate (SR) and secrecy outage probability (SOP) in closed
// series form, plus direct-quadrature counterparts used as consistency checks.
//
//   Psi(v1, v2, v3, v4, v5, tau) = int_0^tau ln^{v1}(1+t) t^{v2} (tau-t)^{-v3}
//                                  exp(-v4 t - v5 t/(tau-t)) dt
//   S(u, v) = Psi(1, u-1, 0, v, 0, inf)

#ifndef FDADM_ANALYTICS_HPP
#define FDADM_ANALYTICS_HPP

#include "fdadm/ftr_channel.hpp"
#include "fdadm/link_model.hpp"

#include <cmath>

namespace fdadm
{
    struct QuadratureOptions
    {
        double rel_tol = 1e-10;
        int max_subdivisions = 15; // bisection depth of the adaptive Gauss-Kronrod rule

        void validate() const;
    };

    // value = exp(log_scale) * mantissa; keeps Psi finite when it over- or underflows a double.
    struct ScaledValue
    {
        double log_scale = 0.0;
        double mantissa = 0.0;

        double value() const { return std::exp(log_scale) * mantissa; }
        double log() const { return log_scale + std::log(mantissa); }
    };

    struct SecrecyResult
    {
        double value = 0.0;
        double i1 = 0.0;
        double i2 = 0.0;
        double i3 = 0.0;
        double truncation_error_bound = 0.0;
    };

    double q_function(double u);

    // (2 / log2 M) Q(sqrt(2 gamma) sin(pi / M)), M a power of two >= 2. The two-neighbour
    // count makes M = 2 return twice the exact BPSK error rate.
    double ber_mpsk(double gamma_b, int m_order);

    ScaledValue psi_integral_scaled(int v1, double v2, double v3, double v4, double v5, double tau,
                                    const QuadratureOptions &opts = {});
    double psi_integral(int v1, double v2, double v3, double v4, double v5, double tau,
                        const QuadratureOptions &opts = {});

    // (u-1)! e^v sum_{k=1}^{u} Gamma(k-u, v) / v^k, with Gamma at non-positive integer
    // order from the recurrence Gamma(a, v) = (Gamma(a+1, v) - v^a e^{-v}) / a.
    double s_closed(int u, double v);
    // v^u / (u-1)! * S(u, v) = E[ln(1+X)] for X ~ Gamma(u, 1/v); stable for large u.
    double s_normalized(int u, double v);

    // Psi(1, j_b, 0, 1/(2 beta1^2 sigma2_b), 0, tau)
    double chi(int j_b, double beta1, double sigma2_b, double tau, const QuadratureOptions &opts = {});

    // Series form I1 + I2 - I3. Falls back to direct quadrature when Eve's AN leakage
    // is degenerate (tau infinite).
    SecrecyResult avg_secrecy_rate(const FtrParams &bob, const FtrParams &eve, double beta1, const EveGains &gains,
                                   const SeriesOptions &sopts = {}, const QuadratureOptions &qopts = {});

    // E[(log2(1+g_B) - log2(1+tau)) 1{g_B > tau}], reported without clipping.
    double sr_lower_bound(const FtrParams &bob, double beta1, double tau,
                          const SeriesOptions &sopts = {}, const QuadratureOptions &qopts = {});

    // P(log2((1+g_B)/(1+g_E)) < r0) through the binomially expanded series.
    SecrecyResult sop(const FtrParams &bob, const FtrParams &eve, double beta1, const EveGains &gains, double r0,
                      const SeriesOptions &sopts = {}, const QuadratureOptions &qopts = {});

    // F_{g_B}(2^r0 (1 + tau) - 1)
    double sop_upper_bound(const FtrParams &bob, double beta1, double tau, double r0, const SeriesOptions &sopts = {});

    // Direct one-dimensional quadrature of the defining integrals over the series pdf/cdf.
    //   i1 = (1/ln2) int_0^inf ln(1+x) f_B(x) F_E(x) dx
    //   i2 = (1/ln2) int_0^tau ln(1+y) f_E(y) F_B(y) dy
    //   i3 = (1/ln2) int_0^tau ln(1+y) f_E(y) dy
    SecrecyResult avg_secrecy_rate_quadrature(const FtrParams &bob, const FtrParams &eve, double beta1,
                                              const EveGains &gains, const SeriesOptions &sopts = {});
    // int_0^tau F_B(2^r0 (1+y) - 1) f_E(y) dy
    double sop_quadrature(const FtrParams &bob, const FtrParams &eve, double beta1, const EveGains &gains, double r0,
                          const SeriesOptions &sopts = {});
}

#endif
