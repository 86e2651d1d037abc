// SPDX-License-Identifier: Apache-2.0

#include "fdadm/ftr_channel.hpp"
#include "fdadm/error.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>

namespace fdadm
{
    namespace
    {
        double log_factorial(int n) { return std::lgamma(n + 1.0); }

        double effective_delta(const FtrParams &p, const SeriesOptions &opts)
        {
            if (p.delta < 1.0 - 1e-12)
                return p.delta;
            if (!opts.delta_limit)
                throw DomainError("FTR: delta = 1 makes the Legendre argument degenerate; enable delta_limit");
            warn("FTR: delta near 1 evaluated at 1 - 1e-9");
            return 1.0 - 1e-9;
        }
    }

    void FtrParams::validate() const
    {
        if (!(m > 0.0) || !std::isfinite(m))
            throw ArgumentError("FTR: m must be positive");
        if (!(K >= 0.0) || !std::isfinite(K))
            throw ArgumentError("FTR: K must be non-negative");
        if (!(delta >= 0.0 && delta <= 1.0))
            throw ArgumentError("FTR: delta must lie in [0, 1]");
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
            throw ArgumentError("FTR: sigma2 must be positive");
    }

    void SeriesOptions::validate() const
    {
        if (max_terms < 1)
            throw ArgumentError("series: max_terms must be >= 1");
        if (!(rel_tol > 0.0))
            throw ArgumentError("series: rel_tol must be positive");
    }

    SpecularAmplitudes specular_amplitudes(const FtrParams &p)
    {
        p.validate();
        const double root = std::sqrt(1.0 - p.delta * p.delta);
        const double u2 = p.sigma2 * p.K * (1.0 + root);
        const double v2 = p.sigma2 * p.K * p.delta * p.delta / (1.0 + root); // = sigma2 K (1 - root)
        return {std::sqrt(u2), std::sqrt(v2)};
    }

    std::complex<double> sample_coefficient(const FtrParams &p, std::mt19937_64 &rng)
    {
        const SpecularAmplitudes a = specular_amplitudes(p);
        std::gamma_distribution<double> fluctuation(p.m, 1.0 / p.m);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::normal_distribution<double> diffuse(0.0, std::sqrt(p.sigma2));

        const double zeta = fluctuation(rng);
        const double phi = phase(rng);
        const double theta = phase(rng);
        const double x = diffuse(rng);
        const double y = diffuse(rng);
        const double s = std::sqrt(zeta);
        return s * (std::polar(a.u, phi) + std::polar(a.v, theta)) + std::complex<double>(x, y);
    }

    namespace
    {
        using big = boost::multiprecision::mpfr_float;

        // Hobson P_nu^{-n}(z) through the Pfaff-form hypergeometric series, at the
        // current default precision.
        big legendre_p_neg(const big &nu, int n, const big &x, const big &log_half_sum, const big &eps)
        {
            // 2F1(-nu, n - nu; 1 + n; x)
            const big a = -nu;
            const big b = n - nu;
            big term = 1;
            big sum = 1;
            for (int k = 0;; ++k)
            {
                const big ratio = (a + k) * (b + k) / ((n + 1 + k) * big(k + 1)) * x;
                term *= ratio;
                sum += term;
                if (term == 0 || (abs(ratio) < 1 && abs(term) < eps * abs(sum)))
                    break;
                if (k > 1000000)
                    throw ConvergenceError("d_j: hypergeometric series did not converge", 0.0, 0.0);
            }
            // x^{n/2} ((1+z)/2)^nu / n!
            return exp(big(n) / 2 * log(x) + nu * log_half_sum - lgamma(big(n + 1))) * sum;
        }

        // d_j at `digits` decimal digits. Returns (value, digits lost to cancellation).
        std::pair<big, double> d_sum(int j, double m_in, double k_in, double delta_in, int digits)
        {
            big::default_precision(digits);
            const big m = m_in, K = k_in, delta = delta_in;
            const big lo = m + K - K * delta;
            const big hi = m + K + K * delta;
            const big a_arg = lo * hi; // (m+K)^2 - (K delta)^2
            const big z = (m + K) / sqrt(a_arg);
            const big x = (z - 1) / (z + 1);
            const big nu = j + m - 1;
            const big eps = pow(big(10), -digits);

            // Gamma(j+m+|mu|) P_nu^{-|mu|}(z), the reduced form of Gamma(j+m+2l-k) P_nu^{k-2l}(z)
            std::vector<big> g(static_cast<std::size_t>(j) + 1);
            if (z == 1)
            {
                g[0] = tgamma(j + m);
                for (int n = 1; n <= j; ++n)
                    g[n] = 0;
            }
            else
            {
                const big log_half_sum = log((1 + z) / 2);
                for (int n = 0; n <= j; ++n)
                    g[n] = tgamma(j + m + n) * legendre_p_neg(nu, n, x, log_half_sum, eps);
            }

            // The cut-continued Legendre phase i^{-(k-2l)} and the outer factor i^{2l-k}
            // combine to i^{2(2l-k)}; they are tracked as a quarter-turn count so the
            // product stays exact and the imaginary part can be checked.
            big re = 0, im = 0, peak = 0;
            const big half_delta = delta / 2;
            big choose_jk = 1, pow_delta = 1;
            for (int k = 0; k <= j; ++k)
            {
                if (k > 0)
                {
                    choose_jk = choose_jk * (j - k + 1) / k;
                    pow_delta *= half_delta;
                }
                if (pow_delta == 0)
                    break;
                big choose_kl = 1;
                for (int l = 0; l <= k; ++l)
                {
                    if (l > 0)
                        choose_kl = choose_kl * (k - l + 1) / l;
                    const big mag = choose_jk * pow_delta * choose_kl * g[std::abs(k - 2 * l)];
                    if (mag > peak)
                        peak = mag;
                    const int quarter_turns = ((2 * (2 * l - k)) % 4 + 4) % 4;
                    switch (quarter_turns)
                    {
                    case 0: re += mag; break;
                    case 1: im += mag; break;
                    case 2: re -= mag; break;
                    default: im -= mag; break;
                    }
                }
            }
            if (re <= 0)
                return {re, static_cast<double>(digits)};
            if (abs(im) > re * 1e-9)
                throw NumericalError("d_j: imaginary residual above 1e-9 of the real part at j=" + std::to_string(j));
            const double lost = static_cast<double>(log10(peak / re));
            return {re * pow(a_arg, -(j + m) / 2), lost};
        }

        std::mutex precision_mutex;
    }

    double log_d_coefficient(int j, const FtrParams &p, const SeriesOptions &opts)
    {
        p.validate();
        if (j < 0)
            throw ArgumentError("d_j: index must be non-negative");
        const double delta = effective_delta(p, opts);

        // The double sum alternates in sign and cancels roughly 0.35 j decimal digits for
        // typical parameters, so it is summed in extended precision, raising the working
        // precision until at least 20 digits survive.
        std::lock_guard lock(precision_mutex);
        const unsigned saved = big::default_precision();
        int digits = 40 + j / 2;
        for (int attempt = 0; attempt < 8; ++attempt)
        {
            auto [value, lost] = d_sum(j, p.m, p.K, delta, digits);
            if (value > 0 && digits - lost >= 20.0)
            {
                const double result = static_cast<double>(log(value));
                big::default_precision(saved);
                return result;
            }
            digits = static_cast<int>(std::ceil(lost)) + 30 + digits / 2;
        }
        big::default_precision(saved);
        throw NumericalError("d_j: cancellation not resolved at j=" + std::to_string(j));
    }

    double d_coefficient(int j, const FtrParams &p, const SeriesOptions &opts)
    {
        return std::exp(log_d_coefficient(j, p, opts));
    }

    namespace
    {
        struct WeightSet
        {
            std::vector<double> weights;
            double residual = 0.0;
        };

        WeightSet compute_weights(const FtrParams &p, const SeriesOptions &opts)
        {
            if (p.K == 0.0)
                return {{1.0}, 0.0};
            const double log_norm = p.m * std::log(p.m) - std::lgamma(p.m);
            const double log_k = std::log(p.K);
            WeightSet set;
            double partial = 0.0;
            int quiet = 0;
            for (int j = 0; j < opts.max_terms; ++j)
            {
                const double w = std::exp(log_norm + j * log_k + log_d_coefficient(j, p, opts) - log_factorial(j));
                set.weights.push_back(w);
                partial += w;
                quiet = (w < opts.rel_tol * partial) ? quiet + 1 : 0;
                if (quiet >= 3)
                {
                    set.residual = 1.0 - partial;
                    return set;
                }
            }
            std::ostringstream os;
            os << "FTR series did not converge within " << opts.max_terms << " terms (last weight "
               << set.weights.back() << ")";
            throw ConvergenceError(os.str(), partial, set.weights.back());
        }

        // The weights depend on (m, K, delta) and the series options only, not on sigma^2.
        const WeightSet &cached_weights(const FtrParams &p, const SeriesOptions &opts)
        {
            using Key = std::tuple<double, double, double, int, double, bool>;
            static std::mutex mutex;
            static std::map<Key, WeightSet> cache;
            const Key key{p.m, p.K, p.delta, opts.max_terms, opts.rel_tol, opts.delta_limit};
            {
                std::lock_guard lock(mutex);
                if (auto it = cache.find(key); it != cache.end())
                    return it->second;
            }
            WeightSet set = compute_weights(p, opts);
            std::lock_guard lock(mutex);
            return cache.emplace(key, std::move(set)).first->second;
        }
    }

    FtrSeries::FtrSeries(const FtrParams &p, const SeriesOptions &opts) : params_(p)
    {
        p.validate();
        opts.validate();
        const WeightSet &set = cached_weights(p, opts);
        weights_ = set.weights;
        residual_ = set.residual;
    }

    double FtrSeries::pdf(double x) const
    {
        if (!(x >= 0.0))
            throw ArgumentError("FTR pdf: x must be non-negative");
        const double s = scale();
        const double y = x / s;
        if (y == 0.0)
            return weights_[0] / s;
        const double log_y = std::log(y);
        double sum = 0.0;
        for (std::size_t j = 0; j < weights_.size(); ++j)
            sum += weights_[j] * std::exp(j * log_y - y - log_factorial(static_cast<int>(j)));
        return sum / s;
    }

    double FtrSeries::cdf(double x) const
    {
        if (!(x >= 0.0))
            throw ArgumentError("FTR cdf: x must be non-negative");
        if (std::isinf(x))
            return std::min(1.0, 1.0 - residual_);
        const double y = x / scale();
        if (y == 0.0)
            return 0.0;
        const double log_y = std::log(y);
        // P(j+1, y) by the recurrence P(a+1, y) = P(a, y) - y^a e^{-y} / a!
        double lower = -std::expm1(-y);
        double sum = 0.0;
        for (std::size_t j = 0; j < weights_.size(); ++j)
        {
            sum += weights_[j] * lower;
            const int a = static_cast<int>(j) + 1;
            lower = std::max(0.0, lower - std::exp(a * log_y - y - log_factorial(a)));
        }
        return std::clamp(sum, 0.0, 1.0);
    }

    double snr_pdf(double x, const FtrParams &p, const SeriesOptions &opts)
    {
        return FtrSeries(p, opts).pdf(x);
    }

    double snr_cdf(double x, const FtrParams &p, const SeriesOptions &opts)
    {
        return FtrSeries(p, opts).cdf(x);
    }

    double sigma_from_avg_snr(double avg_snr, double K, double ps, double noise_var)
    {
        if (!(avg_snr > 0.0) || !(K >= 0.0) || !(ps > 0.0) || !(noise_var > 0.0))
            throw ArgumentError("sigma_from_avg_snr: inputs must be positive (K non-negative)");
        return avg_snr * noise_var / (2.0 * (1.0 + K) * ps);
    }

    double mean_power(double sigma2, double K) { return 2.0 * sigma2 * (1.0 + K); }
}
