// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. With no argument every criterion runs and prints one line;
// with a criterion number only that one runs. Exit status is 0 only if all the
// selected criteria pass.

#include "fdadm/analytics.hpp"
#include "fdadm/array_geometry.hpp"
#include "fdadm/error.hpp"
#include "fdadm/ftr_channel.hpp"
#include "fdadm/link_model.hpp"
#include "fdadm/montecarlo.hpp"
#include "fdadm/precoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace fdadm;

namespace
{
    struct Outcome
    {
        bool pass = true;
        std::string detail;
    };

    std::string fmt(const char *f, double a) { char b[64]; std::snprintf(b, sizeof b, f, a); return b; }

    const Scenario reference{};

    double beam_gain(const Position &p)
    {
        const SteeringVector h_b = steering_vector(reference.array, reference.bob);
        return std::norm(steering_vector(reference.array, p).inner(h_b.entries()));
    }

    // 1. Memory ratios at N = 10, L = 7.
    Outcome memory_ratios()
    {
        const auto sp = memory_footprint(Method::SP, 10, 7).total;
        const auto zf = memory_footprint(Method::ZF, 10, 7).total;
        const auto svd = memory_footprint(Method::SVD, 10, 7).total;
        Outcome o;
        o.pass = sp == 148 && zf == 21756 && svd == 2960;
        o.detail = "SP " + std::to_string(sp) + ", ZF " + std::to_string(zf) + ", SVD " + std::to_string(svd) +
                   fmt("; SP/ZF %.2f%%", 100.0 * sp / zf) + fmt(", SP/SVD %.2f%%", 100.0 * sp / svd);
        return o;
    }

    // 2. Precoder orthogonality over 100 random Bob positions.
    Outcome precoder_orthogonality()
    {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> range(100.0, 5000.0), angle(-M_PI / 2, M_PI / 2);
        double worst_leak = 0.0, worst_p1 = 0.0;
        for (int i = 0; i < 100; ++i)
        {
            const Position pos{range(rng), angle(rng), angle(rng)};
            const SteeringVector h = steering_vector(reference.array, pos);
            for (Method m : {Method::SP, Method::ZF, Method::SVD})
            {
                const PrecoderSet pre = design_precoder(m, h, reference.array.n_half);
                const Eigen::RowVectorXcd leak = h.entries().adjoint() * pre.an_basis();
                worst_leak = std::max(worst_leak, leak.cwiseAbs().maxCoeff());
                worst_p1 = std::max(worst_p1, std::abs(h.inner(pre.p1()) - 1.0));
            }
        }
        return {worst_leak <= 1e-10 && worst_p1 <= 1e-10,
                fmt("max |h^H AN| = %.2e", worst_leak) + fmt(", max |h^H p1 - 1| = %.2e", worst_p1)};
    }

    // 3. KS distance of sampled |eps|^2 against the series CDF, and the weight normalization.
    Outcome ftr_fidelity()
    {
        Outcome o;
        int idx = 0;
        for (const FtrParams &p : {reference.ftr_bob, reference.ftr_eve})
        {
            const FtrSeries series(p);
            const double total = std::accumulate(series.weights().begin(), series.weights().end(), 0.0);
            std::mt19937_64 rng(77 + idx);
            std::vector<double> x(100000);
            for (double &v : x)
                v = std::norm(sample_coefficient(p, rng));
            std::sort(x.begin(), x.end());
            double ks = 0.0;
            const double n = static_cast<double>(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                const double f = series.cdf(x[i]);
                ks = std::max({ks, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
            }
            o.pass = o.pass && ks <= 0.01 && std::abs(total - 1.0) <= 1e-6;
            o.detail += (idx ? "; " : "") + std::string(idx ? "Eve" : "Bob") + fmt(" KS %.4f", ks) +
                        fmt(", |sum w - 1| %.1e", std::abs(total - 1.0));
            ++idx;
        }
        return o;
    }

    // 4. Psi(1, u-1, 0, v, 0, inf) against the closed form.
    Outcome psi_identity()
    {
        double worst = 0.0;
        for (int u = 1; u <= 5; ++u)
            for (double v : {0.25, 0.5, 1.0, 2.0, 5.0})
            {
                const double q = psi_integral(1, u - 1, 0.0, v, 0.0, INFINITY);
                const double c = s_closed(u, v);
                worst = std::max(worst, std::abs(q - c) / std::abs(c));
            }
        return {worst <= 1e-6, fmt("max relative difference %.2e", worst)};
    }

    // 5. BER vs SNR at Bob and Eve against the M-PSK formula.
    Outcome ber_theory()
    {
        Outcome o;
        double worst_z = 0.0, eve_lo = 1.0, eve_hi = 0.0;
        for (double beta1 : {0.9, 0.7})
        {
            SweepSpec s;
            s.metric = Metric::BerVsSnr;
            for (int snr = 0; snr <= 14; snr += 2)
                s.grid.push_back(snr);
            s.trials = 100000;
            s.fixed.beta1 = beta1;
            for (const SweepPoint &p : run_sweep(s).points)
            {
                if (p.receiver == "eve")
                {
                    eve_lo = std::min(eve_lo, *p.mc_value);
                    eve_hi = std::max(eve_hi, *p.mc_value);
                    continue;
                }
                const double th = *p.analytic_value;
                const double se = std::sqrt(th * (1.0 - th) / (2.0 * s.trials));
                const double z = std::abs(*p.mc_value - th) / se;
                worst_z = std::max(worst_z, z);
            }
        }
        o.pass = worst_z <= 3.0 && eve_lo >= 0.4 && eve_hi <= 0.6;
        o.detail = fmt("Bob max |MC - theory| = %.2f stderr", worst_z) + fmt("; Eve BER in [%.3f", eve_lo) +
                   fmt(", %.3f]", eve_hi);
        return o;
    }

    // 6. BER minimum at Bob's coordinates and an off-target plateau.
    Outcome positional_security()
    {
        Outcome o;
        struct Axis
        {
            Metric metric;
            double lo, hi, step, at_bob;
        };
        const Axis axes[] = {{Metric::BerVsRange, 250.0, 15000.0, 250.0, 1000.0},
                             {Metric::BerVsAzimuth, -90.0, 90.0, 5.0, 20.0},
                             {Metric::BerVsElevation, -90.0, 90.0, 5.0, 30.0}};
        for (const Axis &a : axes)
        {
            SweepSpec s;
            s.metric = a.metric;
            s.trials = 20000;
            for (double x = a.lo; x <= a.hi + 1e-9; x += a.step)
                s.grid.push_back(x);
            const SweepResult r = run_sweep(s);
            for (Method m : s.methods)
            {
                double at_bob = NAN, bob_se = 0.0, best = 1.0;
                std::vector<double> off_target;
                for (const SweepPoint &p : r.points)
                {
                    if (p.method != m)
                        continue;
                    Position pos = reference.bob;
                    if (a.metric == Metric::BerVsRange)
                        pos.r = p.x;
                    else if (a.metric == Metric::BerVsAzimuth)
                        pos.theta = deg_to_rad(p.x);
                    else
                        pos.psi = deg_to_rad(p.x);
                    best = std::min(best, *p.mc_value);
                    if (std::abs(p.x - a.at_bob) < 1e-9)
                    {
                        at_bob = *p.mc_value;
                        bob_se = p.mc_stderr;
                    }
                    // Off target: the probe keeps less than a quarter of Bob's beam gain.
                    if (beam_gain(pos) < 0.25)
                        off_target.push_back(*p.mc_value);
                }
                std::sort(off_target.begin(), off_target.end());
                const double plateau = off_target.empty() ? NAN : off_target[off_target.size() / 2];
                const bool ok = at_bob <= best + 3.0 * bob_se && plateau >= 0.3 && plateau <= 0.6 &&
                                at_bob * 100.0 <= plateau;
                o.pass = o.pass && ok;
                if (m == Method::SP)
                    o.detail += std::string(o.detail.empty() ? "" : "; ") + std::string(sweep_variable(a.metric)) +
                                fmt(" Bob %.2e", at_bob) + fmt(" plateau %.3f", plateau);
                else if (!ok)
                    o.detail += "; " + std::string(to_string(m)) + " fails on " + std::string(sweep_variable(a.metric));
            }
        }
        o.detail += " (SP shown; ZF and SVD checked too)";
        return o;
    }

    SweepResult secrecy_sweep(Metric metric, double other_db, std::vector<Method> methods, double r0 = 0.0)
    {
        SweepSpec s;
        s.metric = metric;
        s.grid = {5.0, 10.0, 15.0, 20.0};
        s.methods = std::move(methods);
        s.trials = 100000;
        s.fixed.lambda_e_db = other_db;
        s.fixed.r0 = r0;
        return run_sweep(s);
    }

    // 7. Average secrecy rate series against Monte Carlo, and its monotonicity.
    Outcome sr_vs_mc()
    {
        Outcome o;
        double worst = 0.0;
        std::map<double, std::vector<double>> by_e; // lambda_E -> SR over lambda_B
        for (double le : {0.0, 10.0, 20.0})
            for (const SweepPoint &p : secrecy_sweep(Metric::SrVsLambdaB, le, {Method::SP}).points)
            {
                const double diff = std::abs(*p.analytic_value - *p.mc_value);
                const double tol = std::max(3.0 * p.mc_stderr, 0.05);
                worst = std::max(worst, diff / tol);
                by_e[le].push_back(*p.analytic_value);
            }
        bool mono = true;
        for (auto &[le, v] : by_e)
            for (std::size_t i = 1; i < v.size(); ++i)
                mono = mono && v[i] > v[i - 1];
        for (std::size_t i = 0; i < 4; ++i)
            mono = mono && by_e[0.0][i] > by_e[10.0][i] && by_e[10.0][i] > by_e[20.0][i];
        o.pass = worst <= 1.0 && mono;
        o.detail = fmt("max |analytic - MC| / tolerance = %.2f", worst) + (mono ? "; monotone" : "; NOT monotone");
        return o;
    }

    // 8. Lower bound tightness and NoAN collapse at lambda_E = 40 dB.
    Outcome sr_bound()
    {
        Outcome o;
        double max_gap = 0.0, max_noan = 0.0;
        bool above = true;
        for (const SweepPoint &p : secrecy_sweep(Metric::SrVsLambdaB, 40.0, {Method::SP, Method::NoAN}).points)
        {
            if (p.method == Method::NoAN)
            {
                max_noan = std::max(max_noan, *p.analytic_value);
                continue;
            }
            above = above && *p.analytic_value > *p.bound_value;
            max_gap = std::max(max_gap, *p.analytic_value - *p.bound_value);
        }
        o.pass = above && max_gap <= 0.05 && max_noan <= 0.1;
        o.detail = std::string(above ? "SR above bound" : "SR below bound") + fmt("; max gap %.3f bits/s/Hz", max_gap) +
                   fmt("; max NoAN SR %.3f bits/s/Hz", max_noan);
        return o;
    }

    // 9. SOP series against Monte Carlo and the upper bound.
    Outcome sop_vs_mc()
    {
        Outcome o;
        double worst = 0.0, worst_bound_gap40 = 0.0, worst_excess = -1.0;
        bool ordered = true;
        std::map<std::pair<double, double>, double> at_r0_0;
        for (double r0 : {0.0, 0.5})
            for (double le : {0.0, 10.0, 20.0, 40.0})
                for (const SweepPoint &p : secrecy_sweep(Metric::SopVsLambdaB, le, {Method::SP}, r0).points)
                {
                    const double a = *p.analytic_value;
                    if (le < 40.0)
                        worst = std::max(worst, std::abs(a - *p.mc_value) / std::max(3.0 * p.mc_stderr, 0.01));
                    worst_excess = std::max(worst_excess, a - *p.bound_value);
                    if (le == 40.0)
                        worst_bound_gap40 = std::max(worst_bound_gap40, std::abs(a - *p.bound_value));
                    if (r0 == 0.0)
                        at_r0_0[{le, p.x}] = a;
                    else
                        ordered = ordered && at_r0_0[{le, p.x}] <= a;
                }
        o.pass = worst <= 1.0 && worst_excess <= 0.0 && worst_bound_gap40 <= 0.01 && ordered;
        o.detail = fmt("max |analytic - MC| / tolerance = %.2f", worst) +
                   fmt("; max (SOP - bound) = %.2e", worst_excess) +
                   fmt("; max |SOP - bound| at 40 dB = %.4f", worst_bound_gap40) +
                   (ordered ? "; SOP(0) <= SOP(0.5)" : "; SOP(0) > SOP(0.5) somewhere");
        return o;
    }

    // 10. Series terms against direct quadrature of their defining integrals.
    Outcome appendix_consistency()
    {
        const SteeringVector h_b = steering_vector(reference.array, reference.bob);
        const SteeringVector h_e = steering_vector(reference.array, reference.eve);
        const PowerSplit split(reference.beta1);
        const EveGains g = eve_gains(h_e, design_precoder(Method::SP, h_b, reference.array.n_half), split);
        double worst = 0.0;
        for (auto [lb, le] : {std::pair{5.0, 0.0}, std::pair{15.0, 10.0}, std::pair{20.0, 20.0}})
        {
            FtrParams bob = reference.ftr_bob, eve = reference.ftr_eve;
            bob.sigma2 = sigma_from_avg_snr(std::pow(10.0, lb / 10.0), bob.K);
            eve.sigma2 = sigma_from_avg_snr(std::pow(10.0, le / 10.0), eve.K);
            const SecrecyResult s = avg_secrecy_rate(bob, eve, split.beta1(), g);
            const SecrecyResult q = avg_secrecy_rate_quadrature(bob, eve, split.beta1(), g);
            worst = std::max({worst, std::abs(s.i1 - q.i1), std::abs(s.i2 - q.i2), std::abs(s.i3 - q.i3)});
            for (double r0 : {0.0, 0.5})
                worst = std::max(worst, std::abs(sop(bob, eve, split.beta1(), g, r0).value -
                                                 sop_quadrature(bob, eve, split.beta1(), g, r0)));
        }
        return {worst <= 1e-4, fmt("max |series - quadrature| = %.2e", worst)};
    }
}

int main(int argc, char **argv)
{
    set_warning_sink([](std::string_view) {});
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"memory ratios", memory_ratios},
        {"precoder orthogonality", precoder_orthogonality},
        {"FTR distribution fidelity", ftr_fidelity},
        {"special-function identity", psi_identity},
        {"BER theory vs Monte Carlo", ber_theory},
        {"positional security", positional_security},
        {"average secrecy rate vs Monte Carlo", sr_vs_mc},
        {"secrecy rate lower bound", sr_bound},
        {"SOP vs Monte Carlo and bound", sop_vs_mc},
        {"series vs quadrature", appendix_consistency},
    };

    std::size_t first = 0, last = criteria.size();
    if (argc > 1)
    {
        const int k = std::atoi(argv[1]);
        if (k < 1 || k > static_cast<int>(criteria.size()))
        {
            std::fprintf(stderr, "usage: %s [criterion 1..%zu]\n", argv[0], criteria.size());
            return 1;
        }
        first = static_cast<std::size_t>(k - 1);
        last = first + 1;
    }

    bool all = true;
    for (std::size_t i = first; i < last; ++i)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu (%s): %s: %s [%.1f s]\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
