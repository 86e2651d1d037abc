// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "fdadm/error.hpp"
#include "fdadm/link_model.hpp"
#include "fdadm/montecarlo.hpp"

#include <cmath>
#include <random>

using namespace fdadm;

namespace
{
    const Scenario ref;
    const SteeringVector h_b = steering_vector(ref.array, ref.bob);
    const SteeringVector h_e = steering_vector(ref.array, ref.eve);

    Eigen::VectorXcd draw(Eigen::Index n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g(0.0, std::sqrt(0.5));
        Eigen::VectorXcd z(n);
        for (auto &v : z)
            v = {g(rng), g(rng)};
        return z;
    }

    std::span<const std::complex<double>> as_span(const Eigen::VectorXcd &z)
    {
        return {z.data(), static_cast<std::size_t>(z.size())};
    }
}

TEST_CASE("transmit vector")
{
    const PrecoderSet none = design_precoder(Method::NoAN, h_b, 10);
    const std::complex<double> s(0.6, -0.8);
    const Eigen::VectorXcd x = transmit_vector(none, PowerSplit::no_an(), 2.0, s, {});
    CHECK((x - std::sqrt(2.0) * none.p1() * s).norm() < 1e-14);

    std::mt19937_64 rng(1);
    const PrecoderSet sp = design_precoder(Method::SP, h_b, 10);
    const PowerSplit split(0.9);
    const Eigen::VectorXcd z = draw(1, rng);
    const Eigen::VectorXcd an_only = transmit_vector(sp, split, 1.0, 0.0, as_span(z));
    CHECK(an_only.squaredNorm() == doctest::Approx(split.beta2() * split.beta2() * std::norm(z[0])));

    CHECK_THROWS_AS(transmit_vector(sp, split, 1.0, s, as_span(draw(3, rng))), ArgumentError);
}

TEST_CASE("transmit power and AN power agree across methods")
{
    const PowerSplit split(0.9);
    for (Method m : {Method::SP, Method::ZF, Method::SVD})
    {
        const PrecoderSet pre = design_precoder(m, h_b, 10);
        std::mt19937_64 rng(2);
        double total = 0.0, an = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
        {
            const Eigen::VectorXcd z = draw(pre.an_width(), rng);
            const std::complex<double> s = modulate(static_cast<int>(rng() % 4), Modulation{});
            total += transmit_vector(pre, split, 1.0, s, as_span(z)).squaredNorm();
            an += transmit_vector(pre, split, 1.0, 0.0, as_span(z)).squaredNorm();
        }
        CAPTURE(to_string(m));
        CHECK(total / n == doctest::Approx(1.0).epsilon(0.01));
        CHECK(an / n == doctest::Approx(0.19).epsilon(0.01));
    }
}

TEST_CASE("received signal at Bob and Eve")
{
    const PowerSplit split(0.9);
    std::mt19937_64 rng(3);
    const std::complex<double> s(0.0, 1.0);
    for (Method m : {Method::SP, Method::ZF, Method::SVD})
    {
        const PrecoderSet pre = design_precoder(m, h_b, 10);
        const Eigen::VectorXcd z = draw(pre.an_width(), rng);
        const Eigen::VectorXcd x = transmit_vector(pre, split, 1.0, s, as_span(z));
        CHECK(std::abs(receive(h_b, x, 1.0, 0.0) - 0.9 * s) < 1e-10);
        CHECK(std::abs(receive(ref.array, ref.bob, x, 1.0, 0.0) - 0.9 * s) < 1e-10);
    }
    const PrecoderSet sp = design_precoder(Method::SP, h_b, 10);
    const Eigen::VectorXcd z = draw(1, rng);
    const Eigen::VectorXcd x = transmit_vector(sp, split, 1.0, s, as_span(z));
    const EveGains g = eve_gains(h_e, sp, split);
    const std::complex<double> eps(0.3, 0.4), xi(0.01, -0.02);
    const std::complex<double> expected =
        eps * (0.9 * g.rho1 * s + sp.alpha() * split.beta2() * g.rho2 * z[0]) + xi;
    CHECK(std::abs(receive(h_e, x, eps, xi) - expected) < 1e-12);
}

TEST_CASE("Eve gains")
{
    const PowerSplit split(0.9);
    std::string last_warning;
    const auto old = set_warning_sink([&](std::string_view w) { last_warning = w; });
    const EveGains same = eve_gains(h_b, design_precoder(Method::SP, h_b, 10), split);
    set_warning_sink(old);
    CHECK(same.eta == doctest::Approx(0.81));
    CHECK(same.mu < 1e-20);
    CHECK(std::isinf(same.tau));
    CHECK(!last_warning.empty());

    const EveGains none = eve_gains(h_e, design_precoder(Method::NoAN, h_b, 10), PowerSplit::no_an());
    CHECK(none.mu == 0.0);
    CHECK(eve_sinr(1e6, none) == doctest::Approx(none.eta * 1e6));

    const PrecoderSet sp = design_precoder(Method::SP, h_b, 10);
    const EveGains g = eve_gains(h_e, sp, split);
    const double p2sq = sp.an_basis().col(0).squaredNorm();
    CHECK(g.tau > 0.0);
    CHECK(std::isfinite(g.tau));
    CHECK(g.tau == doctest::Approx(0.81 * std::norm(g.rho1) * p2sq / (0.19 * std::norm(g.rho2))).epsilon(1e-12));
}

TEST_CASE("SNR laws at Bob and Eve")
{
    const FtrParams bob{2.3, 10.0, 0.5, sigma_from_avg_snr(10.0, 10.0)};
    const FtrParams eve{5.3, 15.0, 0.35, sigma_from_avg_snr(10.0, 15.0)};
    for (double x : {0.5, 3.0, 20.0})
    {
        CHECK(gamma_b_cdf(x, bob, 1.0) == doctest::Approx(snr_cdf(x, bob)).epsilon(1e-14));
        CHECK(gamma_b_cdf(0.81 * x, bob, 0.9) == doctest::Approx(snr_cdf(x, bob)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(gamma_b_cdf(1.0, bob, 0.0), DomainError);

    const EveGains g = eve_gains(h_e, design_precoder(Method::SP, h_b, 10), PowerSplit(0.9));
    CHECK(gamma_e_cdf(g.tau, eve, g) == 1.0);
    CHECK(gamma_e_cdf(2.0 * g.tau, eve, g) == 1.0);
    const double tiny = 1e-6 * g.tau;
    CHECK(gamma_e_cdf(tiny, eve, g) == doctest::Approx(snr_cdf(tiny / g.eta, eve)).epsilon(1e-4));

    // Sampler oracle: KS distance of eta L / (mu L + 1).
    std::mt19937_64 rng(4);
    std::vector<double> y(100000);
    for (double &v : y)
        v = eve_sinr(std::norm(sample_coefficient(eve, rng)), g);
    std::sort(y.begin(), y.end());
    const FtrSeries series(eve);
    double ks = 0.0;
    for (std::size_t i = 0; i < y.size(); i += 7)
    {
        const double f = gamma_e_cdf(y[i], series, g);
        ks = std::max({ks, std::abs(f - double(i) / y.size()), std::abs(f - double(i + 1) / y.size())});
    }
    CHECK(ks < 0.01);
}
