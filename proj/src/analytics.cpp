// SPDX-License-Identifier: Apache-2.0

#include "fdadm/analytics.hpp"
#include "fdadm/error.hpp"
#include "fdadm/special.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace fdadm
{
    namespace
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        constexpr double ln2 = std::numbers::ln2;
        // Terms whose bound falls below this are dropped from the nested series.
        constexpr double negligible = 1e-17;

        double softplus(double w) { return w > 0.0 ? w + std::log1p(std::exp(-w)) : std::log1p(std::exp(w)); }

        // log of the Psi integrand after t = tau / (1 + e^{-w}) (finite tau) or t = e^w,
        // including the Jacobian. The map sends (0, tau) to the real line and turns the
        // t -> tau essential singularity into a double-exponential decay in w.
        struct PsiLogIntegrand
        {
            int v1;
            double v2, v3, v4, v5, tau;

            double operator()(double w) const
            {
                double f;
                double t;
                if (std::isinf(tau))
                {
                    t = std::exp(w);
                    f = v2 * w - v4 * t + w;
                }
                else
                {
                    const double log_tau = std::log(tau);
                    const double lt = log_tau - softplus(-w);
                    const double lr = log_tau - softplus(w);
                    t = std::exp(lt);
                    f = v2 * lt - v3 * lr - v4 * t - v5 * std::exp(w) + lt + lr - log_tau;
                }
                if (v1 == 1)
                    f += std::log(std::log1p(t));
                return std::isnan(f) ? -inf : f;
            }
        };

        std::vector<double> tails(const std::vector<double> &w)
        {
            std::vector<double> t(w.size() + 1, 0.0);
            for (std::size_t i = w.size(); i-- > 0;)
                t[i] = t[i + 1] + w[i];
            t.pop_back();
            return t;
        }

        void require_beta1(double beta1)
        {
            if (!(beta1 > 0.0 && beta1 <= 1.0))
                throw ArgumentError("beta1 must lie in (0, 1]");
        }

        // a^{j+1}/j! Psi(1, j, 0, a, 0, tau), the chi term per unit mixture weight
        double chi_normalized(int j, double a, double tau, const QuadratureOptions &opts)
        {
            if (std::isinf(tau))
                return s_normalized(j + 1, a);
            const ScaledValue psi = psi_integral_scaled(1, j, 0.0, a, 0.0, tau, opts);
            return std::exp((j + 1) * std::log(a) - std::lgamma(j + 1.0) + psi.log());
        }

        struct Quadrature
        {
            boost::math::quadrature::tanh_sinh<double> finite;
            boost::math::quadrature::exp_sinh<double> half_line;
        };

        Quadrature &quadrature()
        {
            thread_local Quadrature q;
            return q;
        }

        template <class F>
        double integrate(F f, double lo, double hi)
        {
            constexpr double tol = 1e-10;
            if (lo >= hi)
                return 0.0;
            if (std::isinf(hi))
                return quadrature().half_line.integrate(f, lo, hi, tol);
            return quadrature().finite.integrate(f, lo, hi, tol);
        }
    }

    void QuadratureOptions::validate() const
    {
        if (!(rel_tol > 0.0))
            throw ArgumentError("quadrature: rel_tol must be positive");
        if (max_subdivisions < 0)
            throw ArgumentError("quadrature: max_subdivisions must be non-negative");
    }

    double q_function(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

    double ber_mpsk(double gamma_b, int m_order)
    {
        if (m_order < 2 || (m_order & (m_order - 1)) != 0)
            throw ArgumentError("ber_mpsk: M must be a power of two >= 2");
        if (!(gamma_b >= 0.0))
            throw ArgumentError("ber_mpsk: SNR must be non-negative");
        const double bits = std::log2(static_cast<double>(m_order));
        return 2.0 / bits * q_function(std::sqrt(2.0 * gamma_b) * std::sin(std::numbers::pi / m_order));
    }

    ScaledValue psi_integral_scaled(int v1, double v2, double v3, double v4, double v5, double tau,
                                    const QuadratureOptions &opts)
    {
        opts.validate();
        if (v1 != 0 && v1 != 1)
            throw ArgumentError("Psi: v1 must be 0 or 1");
        if (!(v2 >= 0.0) || !(v3 >= 0.0) || !(v4 >= 0.0) || !(v5 >= 0.0))
            throw ArgumentError("Psi: v2..v5 must be non-negative");
        if (!(tau > 0.0))
            throw ArgumentError("Psi: tau must be positive");
        if (std::isinf(tau) && (v3 != 0.0 || v5 != 0.0 || !(v4 > 0.0)))
            throw DomainError("Psi: infinite tau requires v3 = v5 = 0 and v4 > 0");
        if (!std::isinf(tau) && v3 > 0.0 && !(v5 > 0.0))
            throw DomainError("Psi: v3 > 0 with finite tau requires v5 > 0");

        const PsiLogIntegrand f{v1, v2, v3, v4, v5, tau};

        // Locate the peak of the log-integrand on a coarse grid, then refine it.
        constexpr double w_lo = -100.0, w_step = 0.5;
        constexpr int points = 401;
        std::vector<double> grid(points);
        int best = 0;
        for (int i = 0; i < points; ++i)
        {
            grid[i] = f(w_lo + i * w_step);
            if (grid[i] > grid[best])
                best = i;
        }
        if (grid[best] == -inf)
            throw NumericalError("Psi: integrand vanishes on the whole scan range");

        const double left = w_lo + std::max(best - 1, 0) * w_step;
        const double right = w_lo + std::min(best + 1, points - 1) * w_step;
        const auto refined = boost::math::tools::brent_find_minima([&](double w) { return -f(w); }, left, right, 52);
        double peak_w = refined.first;
        double peak = -refined.second;
        if (grid[best] > peak)
        {
            peak = grid[best];
            peak_w = w_lo + best * w_step;
        }

        // Integrate where the integrand is within e^-60 of its peak.
        constexpr double drop = 60.0;
        int ia = best, ib = best;
        for (int i = 0; i < points; ++i)
            if (grid[i] > peak - drop)
            {
                ia = std::min(ia, i);
                ib = std::max(ib, i);
            }
        if (ia == 0 || ib == points - 1)
            throw ConvergenceError("Psi: integrand is not localized within the scan range", 0.0, 0.0);
        const double wa = w_lo + (ia - 1) * w_step;
        const double wb = w_lo + (ib + 1) * w_step;

        auto g = [&](double w) { return std::exp(f(w) - peak); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
        double err_l = 0.0, err_r = 0.0;
        const unsigned depth = static_cast<unsigned>(opts.max_subdivisions);
        const double lhs = GK::integrate(g, wa, peak_w, depth, opts.rel_tol, &err_l);
        const double rhs = GK::integrate(g, peak_w, wb, depth, opts.rel_tol, &err_r);
        const double mantissa = lhs + rhs;
        if (!(mantissa > 0.0) || err_l + err_r > 1e-6 * mantissa)
        {
            std::ostringstream os;
            os << "Psi: quadrature tolerance not met (estimate " << mantissa << ", error " << err_l + err_r << ")";
            throw ConvergenceError(os.str(), std::exp(peak) * mantissa, std::exp(peak) * (err_l + err_r));
        }
        return {peak, mantissa};
    }

    double psi_integral(int v1, double v2, double v3, double v4, double v5, double tau, const QuadratureOptions &opts)
    {
        return psi_integral_scaled(v1, v2, v3, v4, v5, tau, opts).value();
    }

    double s_closed(int u, double v)
    {
        if (u < 1)
            throw ArgumentError("S: u must be >= 1");
        if (!(v > 0.0))
            throw ArgumentError("S: v must be positive");
        // e^v Gamma(a, v) for a = 0, -1, ..., 1-u
        std::vector<double> g(static_cast<std::size_t>(u));
        g[0] = special::scaled_expint(1, v);
        for (int a = -1; a >= 1 - u; --a)
            g[-a] = (g[-a - 1] - std::pow(v, a)) / a;
        double sum = 0.0;
        for (int k = 1; k <= u; ++k)
            sum += g[u - k] / std::pow(v, k);
        return std::exp(std::lgamma(static_cast<double>(u))) * sum;
    }

    double s_normalized(int u, double v)
    {
        if (u < 1)
            throw ArgumentError("S: u must be >= 1");
        if (!(v > 0.0))
            throw ArgumentError("S: v must be positive");
        // sum_{b<u} e^v E_{b+1}(v); the upward recurrence H(b) = (1 - v H(b-1)) / b is
        // stable only once b exceeds v.
        double sum = 0.0;
        double h = 0.0;
        for (int b = 0; b < u; ++b)
        {
            h = (b == 0 || b < v + 1.0) ? special::scaled_expint(b + 1, v) : (1.0 - v * h) / b;
            sum += h;
        }
        return sum;
    }

    double chi(int j_b, double beta1, double sigma2_b, double tau, const QuadratureOptions &opts)
    {
        require_beta1(beta1);
        if (j_b < 0 || !(sigma2_b > 0.0))
            throw ArgumentError("chi: need j_b >= 0 and sigma2_b > 0");
        const double a = 1.0 / (2.0 * beta1 * beta1 * sigma2_b);
        if (std::isinf(tau))
            return s_closed(j_b + 1, a);
        return psi_integral(1, j_b, 0.0, a, 0.0, tau, opts);
    }

    SecrecyResult avg_secrecy_rate(const FtrParams &bob, const FtrParams &eve, double beta1, const EveGains &gains,
                                   const SeriesOptions &sopts, const QuadratureOptions &qopts)
    {
        require_beta1(beta1);
        const FtrSeries b_series(bob, sopts);
        const FtrSeries e_series(eve, sopts);
        const std::vector<double> &wb = b_series.weights();
        const std::vector<double> &we = e_series.weights();
        const double a = 1.0 / (beta1 * beta1 * b_series.scale());

        SecrecyResult r;
        if (gains.eta == 0.0)
        {
            for (std::size_t j = 0; j < wb.size(); ++j)
                r.i1 += wb[j] * s_normalized(static_cast<int>(j) + 1, a);
            r.i1 /= ln2;
            r.value = r.i1;
            r.truncation_error_bound = wb.back() * s_normalized(static_cast<int>(wb.size()), a) / ln2;
            return r;
        }
        if (gains.degenerate())
            return avg_secrecy_rate_quadrature(bob, eve, beta1, gains, sopts);

        const double tau = gains.tau;
        const double c = 1.0 / (gains.mu * e_series.scale());
        const double log_a = std::log(a), log_c = std::log(c), log_tau = std::log(tau);
        const std::vector<double> tail_b = tails(wb);
        const std::vector<double> tail_e = tails(we);
        const double total_b = tail_b[0], total_e = tail_e[0];
        const double log_cap = std::log1p(tau); // bound on every Psi-based term in I2 and I3

        // I1: Bob's pdf against Eve's cdf on [0, tau), plus the [tau, inf) remainder.
        double last_i1 = 0.0;
        for (std::size_t jb = 0; jb < wb.size(); ++jb)
        {
            const int j = static_cast<int>(jb);
            const double s = s_normalized(j + 1, a);
            if (wb[jb] * s < negligible)
                continue;
            const double x = chi_normalized(j, a, tau, qopts);
            const double head = (j + 1) * log_a - std::lgamma(j + 1.0);
            double inner = 0.0;
            for (std::size_t n = 0; n < we.size(); ++n)
            {
                if (wb[jb] * tail_e[n] * x < negligible)
                    break;
                const ScaledValue psi = psi_integral_scaled(1, j + static_cast<double>(n), static_cast<double>(n), a, c, tau, qopts);
                inner += tail_e[n] * std::exp(head + n * log_c - std::lgamma(n + 1.0) + psi.log());
            }
            last_i1 = wb[jb] * (total_e * x - inner + s - x);
            r.i1 += last_i1;
        }

        // I2 and I3: Eve's pdf against ln(1+y) F_B(y) and ln(1+y).
        double last_i2 = 0.0, last_i3 = 0.0;
        for (std::size_t je = 0; je < we.size(); ++je)
        {
            if (we[je] * log_cap < negligible)
                continue;
            const int j = static_cast<int>(je);
            const double head = log_tau + (j + 1) * log_c - std::lgamma(j + 1.0);
            const double u = std::exp(head + psi_integral_scaled(1, j, j + 2.0, 0.0, c, tau, qopts).log());
            double inner = 0.0;
            for (std::size_t n = 0; n < wb.size(); ++n)
            {
                if (we[je] * tail_b[n] * log_cap < negligible)
                    break;
                const ScaledValue psi = psi_integral_scaled(1, j + static_cast<double>(n), j + 2.0, a, c, tau, qopts);
                inner += tail_b[n] * std::exp(head + n * log_a - std::lgamma(n + 1.0) + psi.log());
            }
            last_i2 = we[je] * (total_b * u - inner);
            last_i3 = we[je] * u;
            r.i2 += last_i2;
            r.i3 += last_i3;
        }

        r.i1 /= ln2;
        r.i2 /= ln2;
        r.i3 /= ln2;
        r.value = r.i1 + r.i2 - r.i3;
        r.truncation_error_bound = (std::abs(last_i1) + std::abs(last_i2) + std::abs(last_i3)) / ln2 +
                                   (std::abs(b_series.truncation_residual()) + std::abs(e_series.truncation_residual())) *
                                       (r.i1 + r.i3);
        return r;
    }

    double sr_lower_bound(const FtrParams &bob, double beta1, double tau, const SeriesOptions &sopts,
                          const QuadratureOptions &qopts)
    {
        require_beta1(beta1);
        if (!(tau > 0.0) || std::isinf(tau))
            throw ArgumentError("sr_lower_bound: tau must be finite and positive");
        const FtrSeries b_series(bob, sopts);
        const std::vector<double> &wb = b_series.weights();
        const double a = 1.0 / (beta1 * beta1 * b_series.scale());

        double above = 0.0; // (1/ln2) E[ln(1+g_B) 1{g_B > tau}]
        double survival = 0.0;
        for (std::size_t jb = 0; jb < wb.size(); ++jb)
        {
            const int j = static_cast<int>(jb);
            const double s = s_normalized(j + 1, a);
            if (wb[jb] * s < negligible)
                continue;
            above += wb[jb] * (s - chi_normalized(j, a, tau, qopts));
            survival += wb[jb] * boost::math::gamma_q(j + 1.0, a * tau);
        }
        return above / ln2 - std::log2(1.0 + tau) * survival;
    }

    SecrecyResult sop(const FtrParams &bob, const FtrParams &eve, double beta1, const EveGains &gains, double r0,
                      const SeriesOptions &sopts, const QuadratureOptions &qopts)
    {
        require_beta1(beta1);
        if (!(r0 >= 0.0))
            throw ArgumentError("sop: target rate must be non-negative");
        SecrecyResult r;
        if (gains.eta == 0.0)
        {
            r.value = gamma_b_cdf(std::exp2(r0) - 1.0, FtrSeries(bob, sopts), beta1);
            return r;
        }
        if (gains.degenerate())
        {
            r.value = sop_quadrature(bob, eve, beta1, gains, r0, sopts);
            return r;
        }

        const FtrSeries b_series(bob, sopts);
        const FtrSeries e_series(eve, sopts);
        const std::vector<double> &wb = b_series.weights();
        const std::vector<double> &we = e_series.weights();
        const double a = 1.0 / (beta1 * beta1 * b_series.scale());
        const double tau = gains.tau;
        const double c = 1.0 / (gains.mu * e_series.scale());
        const double p = a * std::exp2(r0);
        const double q = a * std::expm1(r0 * ln2);
        const std::vector<double> tail_b = tails(wb);
        const double total_b = tail_b[0];

        // Binomial expansion of (q + p y)^n regrouped by the power of y:
        // weight[k] = sum_{j_B >= k} w_B P(Poisson(q) <= j_B - k)
        std::vector<double> weight(wb.size(), 0.0);
        for (std::size_t k = 0; k < wb.size(); ++k)
            for (std::size_t jb = k; jb < wb.size(); ++jb)
                weight[k] += wb[jb] * (q > 0.0 ? boost::math::gamma_q(static_cast<double>(jb - k) + 1.0, q) : 1.0);

        const double log_p = std::log(p), log_c = std::log(c), log_tau = std::log(tau);
        double last = 0.0;
        for (std::size_t je = 0; je < we.size(); ++je)
        {
            if (we[je] < negligible)
                continue;
            const int j = static_cast<int>(je);
            const double head = log_tau + (j + 1) * log_c - std::lgamma(j + 1.0);
            const double v = std::exp(head + psi_integral_scaled(0, j, j + 2.0, 0.0, c, tau, qopts).log());
            double inner = 0.0;
            for (std::size_t k = 0; k < wb.size(); ++k)
            {
                if (we[je] * tail_b[k] < negligible)
                    break;
                const ScaledValue psi = psi_integral_scaled(0, j + static_cast<double>(k), j + 2.0, p, c, tau, qopts);
                inner += weight[k] * std::exp(head + k * log_p - std::lgamma(k + 1.0) + psi.log());
            }
            last = we[je] * (total_b * v - inner);
            r.value += last;
        }
        r.truncation_error_bound = std::abs(last) + std::abs(b_series.truncation_residual()) +
                                   std::abs(e_series.truncation_residual());
        if (r.value < -1e-6 || r.value > 1.0 + 1e-6)
        {
            std::ostringstream os;
            os << "sop: series value " << r.value << " outside [0, 1]";
            throw NumericalError(os.str());
        }
        r.value = std::clamp(r.value, 0.0, 1.0);
        return r;
    }

    double sop_upper_bound(const FtrParams &bob, double beta1, double tau, double r0, const SeriesOptions &sopts)
    {
        require_beta1(beta1);
        if (!(tau > 0.0) || std::isinf(tau))
            throw ArgumentError("sop_upper_bound: tau must be finite and positive");
        if (!(r0 >= 0.0))
            throw ArgumentError("sop_upper_bound: target rate must be non-negative");
        return gamma_b_cdf(std::exp2(r0) * (1.0 + tau) - 1.0, FtrSeries(bob, sopts), beta1);
    }

    SecrecyResult avg_secrecy_rate_quadrature(const FtrParams &bob, const FtrParams &eve, double beta1,
                                              const EveGains &gains, const SeriesOptions &sopts)
    {
        require_beta1(beta1);
        const FtrSeries b_series(bob, sopts);
        const FtrSeries e_series(eve, sopts);
        const double tau = gains.tau;

        auto f_b = [&](double x) { return gamma_b_pdf(x, b_series, beta1); };
        auto cdf_b = [&](double x) { return gamma_b_cdf(x, b_series, beta1); };
        auto f_e = [&](double x) { return gamma_e_pdf(x, e_series, gains); };
        auto cdf_e = [&](double x) { return gamma_e_cdf(x, e_series, gains); };

        SecrecyResult r;
        if (gains.eta == 0.0)
        {
            r.i1 = integrate([&](double x) { return std::log1p(x) * f_b(x); }, 0.0, inf) / ln2;
            r.value = r.i1;
            return r;
        }
        auto i1_integrand = [&](double x) { return std::log1p(x) * f_b(x) * cdf_e(x); };
        r.i1 = integrate(i1_integrand, 0.0, tau);
        if (!std::isinf(tau))
            r.i1 += integrate([&](double x) { return std::log1p(x) * f_b(x); }, tau, inf);
        r.i2 = integrate([&](double y) { return std::log1p(y) * f_e(y) * cdf_b(y); }, 0.0, tau);
        r.i3 = integrate([&](double y) { return std::log1p(y) * f_e(y); }, 0.0, tau);
        r.i1 /= ln2;
        r.i2 /= ln2;
        r.i3 /= ln2;
        r.value = r.i1 + r.i2 - r.i3;
        return r;
    }

    double sop_quadrature(const FtrParams &bob, const FtrParams &eve, double beta1, const EveGains &gains, double r0,
                          const SeriesOptions &sopts)
    {
        require_beta1(beta1);
        if (!(r0 >= 0.0))
            throw ArgumentError("sop: target rate must be non-negative");
        const FtrSeries b_series(bob, sopts);
        const FtrSeries e_series(eve, sopts);
        const double scale = std::exp2(r0);
        if (gains.eta == 0.0)
            return gamma_b_cdf(scale - 1.0, b_series, beta1);
        auto integrand = [&](double y)
        { return gamma_b_cdf(scale * (1.0 + y) - 1.0, b_series, beta1) * gamma_e_pdf(y, e_series, gains); };
        return std::clamp(integrate(integrand, 0.0, gains.tau), 0.0, 1.0);
    }
}
