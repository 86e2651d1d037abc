// SPDX-License-Identifier: Apache-2.0
//
// Transmit/receive signal model and the SNR/SINR laws at Bob and Eve.
//
//   x   = beta1 sqrt(Ps) p1 s + AN
//   y   = eps h^H x + xi
//   g_B = beta1^2 lambda_B
//   g_E = eta lambda_E / (mu lambda_E + 1),  eta = beta1^2 |rho1|^2, mu = AN leakage gain
//
// where lambda = |eps|^2 Ps / noise variance.

#ifndef FDADM_LINK_MODEL_HPP
#define FDADM_LINK_MODEL_HPP

#include "fdadm/ftr_channel.hpp"
#include "fdadm/precoder.hpp"

#include <complex>
#include <limits>
#include <span>

namespace fdadm
{
    struct LinkBudget
    {
        double ps = 1.0;
        double noise_var_b = 1.0;
        double noise_var_e = 1.0;
        PowerSplit split{0.9};

        void validate() const;
    };

    struct EveGains
    {
        std::complex<double> rho1;
        // SP: h_E^H p2. ZF/SVD: sqrt of the expected leakage ||an_basis^H h_E||^2 / rank.
        std::complex<double> rho2;
        double eta = 0.0;
        double mu = 0.0;
        double tau = std::numeric_limits<double>::infinity();

        bool degenerate() const { return !(mu >= 1e-12); }
    };

    // x = beta1 sqrt(Ps) p1 s + AN. SP sends alpha beta2 sqrt(Ps) p2 z; ZF/SVD send
    // beta2 sqrt(Ps) A z / ||A z|| so the AN power is exactly beta2^2 Ps on every draw.
    Eigen::VectorXcd transmit_vector(const PrecoderSet &pre, const PowerSplit &split, double ps,
                                     std::complex<double> symbol, std::span<const std::complex<double>> an);

    // y = eps h^H x + xi
    std::complex<double> receive(const SteeringVector &h, const Eigen::VectorXcd &x,
                                 std::complex<double> eps, std::complex<double> noise);
    std::complex<double> receive(const ArrayConfig &cfg, const Position &pos, const Eigen::VectorXcd &x,
                                 std::complex<double> eps, std::complex<double> noise, double t = 0.0);

    // Warns when an AN method leaks less than 1e-12 to Eve (co-located Eve).
    EveGains eve_gains(const SteeringVector &h_e, const PrecoderSet &pre, const PowerSplit &split);

    // Instantaneous SINR at Eve for a given lambda_E.
    double eve_sinr(double lambda_e, const EveGains &g);

    double gamma_b_cdf(double x, const FtrSeries &bob, double beta1);
    double gamma_b_pdf(double x, const FtrSeries &bob, double beta1);
    double gamma_e_cdf(double x, const FtrSeries &eve, const EveGains &g);
    double gamma_e_pdf(double x, const FtrSeries &eve, const EveGains &g);

    double gamma_b_cdf(double x, const FtrParams &bob, double beta1, const SeriesOptions &opts = {});
    double gamma_b_pdf(double x, const FtrParams &bob, double beta1, const SeriesOptions &opts = {});
    double gamma_e_cdf(double x, const FtrParams &eve, const EveGains &g, const SeriesOptions &opts = {});
    double gamma_e_pdf(double x, const FtrParams &eve, const EveGains &g, const SeriesOptions &opts = {});
}

#endif
