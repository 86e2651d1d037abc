// SPDX-License-Identifier: Apache-2.0

#include "fdadm/special.hpp"
#include "fdadm/error.hpp"

#include <boost/math/special_functions/expint.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace fdadm::special
{
    double log_hyp2f1_positive(double a, double b, double c, double x)
    {
        if (!(x >= 0.0 && x < 1.0))
            throw DomainError("hyp2f1: argument must lie in [0, 1)");
        if (!(c > 0.0))
            throw DomainError("hyp2f1: c must be positive");

        constexpr double rescale = 1e200;
        const double log_rescale = std::log(rescale);
        double offset = 0.0; // true value = exp(offset) * sum
        double term = 1.0;
        double sum = 1.0;
        int quiet = 0;
        for (int k = 0; k < 200000; ++k)
        {
            const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
            term *= ratio;
            if (term == 0.0)
                break;
            sum += term;
            if (std::abs(sum) > rescale)
            {
                sum /= rescale;
                term /= rescale;
                offset += log_rescale;
            }
            // Once |ratio| < 1 it stays below 1 for these parameters, so the tail is bounded.
            const bool past_peak = std::abs(ratio) < 1.0;
            if (past_peak && std::abs(term) < 1e-17 * std::abs(sum))
            {
                if (++quiet >= 3)
                    break;
            }
            else
                quiet = 0;
            if (k == 199999)
                throw ConvergenceError("hyp2f1: series did not converge", offset + std::log(std::abs(sum)), term);
        }
        if (!(sum > 0.0))
            throw NumericalError("hyp2f1: series sum is not positive");
        return offset + std::log(sum);
    }

    double log_legendre_p_neg(double nu, int n, double z)
    {
        if (n < 0)
            throw ArgumentError("legendre: order magnitude must be non-negative");
        if (!(nu > -1.0))
            throw DomainError("legendre: degree must exceed -1");
        if (!(z >= 1.0) || !std::isfinite(z))
            throw DomainError("legendre: argument must be finite and >= 1");
        if (z == 1.0)
            return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();

        // Pfaff form: P^{-n}(z) = ((z-1)/(z+1))^{n/2} ((1+z)/2)^nu 2F1(-nu, n-nu; 1+n; (z-1)/(z+1)) / n!
        const double x = (z - 1.0) / (z + 1.0);
        return -std::lgamma(n + 1.0) + 0.5 * n * std::log(x) + nu * std::log((1.0 + z) / 2.0) +
               log_hyp2f1_positive(-nu, n - nu, 1.0 + n, x);
    }

    double legendre_p_hobson(double nu, int mu, double z)
    {
        if (mu <= 0)
            return std::exp(log_legendre_p_neg(nu, -mu, z));
        if (!(nu - mu + 1.0 > 0.0))
            throw DomainError("legendre: reflection requires nu - mu + 1 > 0");
        return std::exp(std::lgamma(nu + mu + 1.0) - std::lgamma(nu - mu + 1.0) + log_legendre_p_neg(nu, mu, z));
    }

    std::complex<double> legendre_p_type2(double nu, int mu, double z)
    {
        return std::polar(legendre_p_hobson(nu, mu, z), -std::numbers::pi * mu / 2.0);
    }

    double scaled_expint(int n, double v)
    {
        if (n < 1 || !(v > 0.0))
            throw DomainError("expint: need n >= 1 and v > 0");
        if (v > 600.0)
        {
            // Continued fraction through Boost underflows; use the asymptotic expansion.
            double sum = 1.0, term = 1.0;
            for (int k = 1; k < 30; ++k)
            {
                term *= -(n + k - 1.0) / v;
                sum += term;
                if (std::abs(term) < 1e-17)
                    break;
            }
            return sum / v;
        }
        return std::exp(v) * boost::math::expint(n, v);
    }
}
