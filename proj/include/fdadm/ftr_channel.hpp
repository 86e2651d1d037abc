// SPDX-License-Identifier: Apache-2.0
//
// Fluctuating two-ray (FTR) fading.
//
// The faded power |eps|^2 follows a mixture of Gamma(j+1, 2 sigma^2) laws with
// weights w_j = (m^m / Gamma(m)) K^j d_j / j!, where d_j is a double sum over
// associated Legendre functions of the first kind.

#ifndef FDADM_FTR_CHANNEL_HPP
#define FDADM_FTR_CHANNEL_HPP

#include <complex>
#include <random>
#include <vector>

namespace fdadm
{
    struct FtrParams
    {
        double m = 1.0;      // fading severity (Gamma shape of the specular fluctuation)
        double K = 0.0;      // specular-to-diffuse power ratio
        double delta = 0.0;  // specular balance in [0, 1]
        double sigma2 = 0.5; // diffuse variance per real dimension

        void validate() const; // throws ArgumentError
        double mean_power() const { return 2.0 * sigma2 * (1.0 + K); }
    };

    struct SpecularAmplitudes
    {
        double u = 0.0;
        double v = 0.0;
    };

    struct SeriesOptions
    {
        int max_terms = 600;
        double rel_tol = 1e-10;
        // Evaluate delta >= 1 - 1e-12 at delta = 1 - 1e-9 instead of failing.
        bool delta_limit = false;

        void validate() const;
    };

    SpecularAmplitudes specular_amplitudes(const FtrParams &p);

    // eps = sqrt(zeta) (U e^{i phi} + V e^{i theta}) + X + iY
    std::complex<double> sample_coefficient(const FtrParams &p, std::mt19937_64 &rng);

    // d_j, evaluated in complex arithmetic. Throws NumericalError if the imaginary
    // residual exceeds 1e-9 of the real part, DomainError for delta near 1 without limit mode.
    double d_coefficient(int j, const FtrParams &p, const SeriesOptions &opts = {});
    // log d_j (d_j > 0)
    double log_d_coefficient(int j, const FtrParams &p, const SeriesOptions &opts = {});

    // Truncated mixture representation of the faded SNR law, built once and reused.
    class FtrSeries
    {
    public:
        explicit FtrSeries(const FtrParams &p, const SeriesOptions &opts = {});

        const FtrParams &params() const { return params_; }
        // Mixture weights w_j, j = 0..terms()-1.
        const std::vector<double> &weights() const { return weights_; }
        std::size_t terms() const { return weights_.size(); }
        // 2 sigma^2, the scale of every Gamma component
        double scale() const { return 2.0 * params_.sigma2; }
        // 1 - sum of retained weights
        double truncation_residual() const { return residual_; }
        // Magnitude of the last retained weight.
        double last_term() const { return weights_.empty() ? 0.0 : weights_.back(); }

        double pdf(double x) const;
        double cdf(double x) const;

    private:
        FtrParams params_;
        std::vector<double> weights_;
        double residual_ = 0.0;
    };

    double snr_pdf(double x, const FtrParams &p, const SeriesOptions &opts = {});
    double snr_cdf(double x, const FtrParams &p, const SeriesOptions &opts = {});

    // sigma^2 such that 2 sigma^2 (1 + K) Ps / noise_var = avg_snr
    double sigma_from_avg_snr(double avg_snr, double K, double ps = 1.0, double noise_var = 1.0);
    double mean_power(double sigma2, double K);
}

#endif
