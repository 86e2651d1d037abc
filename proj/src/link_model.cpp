// SPDX-License-Identifier: Apache-2.0

#include "fdadm/link_model.hpp"
#include "fdadm/error.hpp"

#include <cmath>

namespace fdadm
{
    void LinkBudget::validate() const
    {
        if (!(ps > 0.0) || !(noise_var_b > 0.0) || !(noise_var_e > 0.0))
            throw ArgumentError("link budget: power and noise variances must be positive");
    }

    Eigen::VectorXcd transmit_vector(const PrecoderSet &pre, const PowerSplit &split, double ps,
                                     std::complex<double> symbol, std::span<const std::complex<double>> an)
    {
        if (static_cast<Eigen::Index>(an.size()) != pre.an_width())
            throw ArgumentError("transmit: AN draw width does not match the precoding method");
        const double amp = std::sqrt(ps);
        Eigen::VectorXcd x = (split.beta1() * amp * symbol) * pre.p1();
        if (pre.an_width() == 0 || split.beta2() == 0.0)
            return x;

        Eigen::Map<const Eigen::VectorXcd> z(an.data(), static_cast<Eigen::Index>(an.size()));
        if (pre.method() == Method::SP)
        {
            x += (pre.alpha() * split.beta2() * amp * z[0]) * pre.an_basis().col(0);
            return x;
        }
        const Eigen::VectorXcd direction = pre.an_basis() * z;
        const double norm = direction.norm();
        if (norm > 0.0)
            x += (split.beta2() * amp / norm) * direction;
        return x;
    }

    std::complex<double> receive(const SteeringVector &h, const Eigen::VectorXcd &x,
                                 std::complex<double> eps, std::complex<double> noise)
    {
        if (h.size() != x.size())
            throw ArgumentError("receive: steering vector and transmit vector differ in size");
        return eps * h.inner(x) + noise;
    }

    std::complex<double> receive(const ArrayConfig &cfg, const Position &pos, const Eigen::VectorXcd &x,
                                 std::complex<double> eps, std::complex<double> noise, double t)
    {
        return receive(steering_vector(cfg, pos, t), x, eps, noise);
    }

    EveGains eve_gains(const SteeringVector &h_e, const PrecoderSet &pre, const PowerSplit &split)
    {
        if (h_e.size() != pre.dimension())
            throw ArgumentError("eve_gains: steering vector and precoder differ in size");
        EveGains g;
        g.rho1 = h_e.inner(pre.p1());
        g.eta = split.beta1() * split.beta1() * std::norm(g.rho1);

        double leakage = 0.0;
        switch (pre.method())
        {
        case Method::NoAN:
            break;
        case Method::SP:
            g.rho2 = h_e.inner(pre.an_basis().col(0));
            leakage = pre.alpha() * pre.alpha() * std::norm(g.rho2);
            break;
        case Method::ZF:
        case Method::SVD:
            // The per-draw normalized direction A z / ||A z|| is isotropic in the AN subspace,
            // so E|h_E^H (A z / ||A z||)|^2 = ||A^H h_E||^2 / rank.
            leakage = (pre.an_basis().adjoint() * h_e.entries()).squaredNorm() / pre.an_rank();
            g.rho2 = std::sqrt(leakage);
            break;
        }
        g.mu = split.beta2() * split.beta2() * leakage;
        if (g.degenerate())
        {
            g.tau = std::numeric_limits<double>::infinity();
            if (pre.method() != Method::NoAN)
                warn("Eve's AN leakage is below 1e-12; her SINR is unbounded and secrecy collapses");
        }
        else
            g.tau = g.eta / g.mu;
        return g;
    }

    double eve_sinr(double lambda_e, const EveGains &g)
    {
        if (g.degenerate())
            return g.eta * lambda_e;
        return g.eta * lambda_e / (g.mu * lambda_e + 1.0);
    }

    namespace
    {
        void require_beta1(double beta1)
        {
            if (!(beta1 > 0.0))
                throw DomainError("gamma_B law: beta1 = 0 leaves Bob without signal");
        }
    }

    double gamma_b_cdf(double x, const FtrSeries &bob, double beta1)
    {
        require_beta1(beta1);
        return bob.cdf(x / (beta1 * beta1));
    }

    double gamma_b_pdf(double x, const FtrSeries &bob, double beta1)
    {
        require_beta1(beta1);
        const double b2 = beta1 * beta1;
        return bob.pdf(x / b2) / b2;
    }

    double gamma_e_cdf(double x, const FtrSeries &eve, const EveGains &g)
    {
        if (!(x >= 0.0))
            throw ArgumentError("gamma_E cdf: x must be non-negative");
        if (g.eta == 0.0)
            return 1.0; // Eve sits on a null of p1
        if (g.degenerate())
            return eve.cdf(x / g.eta);
        if (x >= g.tau)
            return 1.0;
        return eve.cdf(x / (g.eta - g.mu * x));
    }

    double gamma_e_pdf(double x, const FtrSeries &eve, const EveGains &g)
    {
        if (!(x >= 0.0))
            throw ArgumentError("gamma_E pdf: x must be non-negative");
        if (g.eta == 0.0)
            return 0.0;
        if (g.degenerate())
            return eve.pdf(x / g.eta) / g.eta;
        if (x >= g.tau)
            return 0.0;
        const double den = g.eta - g.mu * x;
        return g.eta / (den * den) * eve.pdf(x / den);
    }

    double gamma_b_cdf(double x, const FtrParams &bob, double beta1, const SeriesOptions &opts)
    {
        return gamma_b_cdf(x, FtrSeries(bob, opts), beta1);
    }

    double gamma_b_pdf(double x, const FtrParams &bob, double beta1, const SeriesOptions &opts)
    {
        return gamma_b_pdf(x, FtrSeries(bob, opts), beta1);
    }

    double gamma_e_cdf(double x, const FtrParams &eve, const EveGains &g, const SeriesOptions &opts)
    {
        return gamma_e_cdf(x, FtrSeries(eve, opts), g);
    }

    double gamma_e_pdf(double x, const FtrParams &eve, const EveGains &g, const SeriesOptions &opts)
    {
        return gamma_e_pdf(x, FtrSeries(eve, opts), g);
    }
}
