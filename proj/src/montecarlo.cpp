// SPDX-License-Identifier: Apache-2.0

#include "fdadm/montecarlo.hpp"
#include "fdadm/error.hpp"
#include "fdadm/link_model.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace fdadm
{
    namespace
    {
        int gray(int k) { return k ^ (k >> 1); }

        int gray_inverse(int g)
        {
            int k = 0;
            for (; g; g >>= 1)
                k ^= g;
            return k;
        }

        bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

        int qam_side(int order) { return static_cast<int>(std::lround(std::sqrt(static_cast<double>(order)))); }

        double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

        template <class F>
        void parallel_for(std::size_t n, unsigned threads, F &&task)
        {
            if (threads == 0)
                threads = std::max(1u, std::thread::hardware_concurrency());
            threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
            if (threads <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                    task(i);
                return;
            }
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&]
                                  {
                    for (std::size_t i = next++; i < n; i = next++)
                    {
                        try
                        {
                            task(i);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    } });
            for (auto &th : pool)
                th.join();
            if (failure)
                std::rethrow_exception(failure);
        }

        std::complex<double> cgauss(std::mt19937_64 &rng, std::normal_distribution<double> &unit)
        {
            constexpr double half = std::numbers::sqrt2 / 2.0;
            const double re = unit(rng);
            const double im = unit(rng);
            return {half * re, half * im};
        }

        PowerSplit split_for(Method m, double beta1) { return m == Method::NoAN ? PowerSplit(1.0) : PowerSplit(beta1); }

        // What one receiver sees of the transmit vector.
        struct ReceiverView
        {
            std::string name;
            std::complex<double> signal_gain; // h^H p1
            Eigen::RowVectorXcd an_row;       // h^H an_basis
        };

        ReceiverView view(std::string name, const SteeringVector &h, const PrecoderSet &pre)
        {
            ReceiverView v{std::move(name), h.inner(pre.p1()), Eigen::RowVectorXcd()};
            if (pre.an_width() > 0)
                v.an_row = h.entries().adjoint() * pre.an_basis();
            return v;
        }

        // AN amplitude at a receiver for draw z: the transmitted AN is alpha beta2 sqrt(Ps) p2 z (SP)
        // or beta2 sqrt(Ps) A z / ||A z|| (ZF/SVD).
        std::complex<double> an_at(const ReceiverView &v, const PrecoderSet &pre, const Eigen::VectorXcd &z,
                                   double an_norm, double beta2_amp)
        {
            if (pre.an_width() == 0)
                return 0.0;
            const std::complex<double> leak = v.an_row * z;
            if (pre.method() == Method::SP)
                return pre.alpha() * beta2_amp * leak;
            return an_norm > 0.0 ? beta2_amp * leak / std::sqrt(an_norm) : 0.0;
        }

        std::vector<PrecoderSet> build_precoders(const SweepSpec &spec, const SteeringVector &h_b)
        {
            std::vector<PrecoderSet> pres;
            for (Method m : spec.methods)
                pres.push_back(design_precoder(m, h_b, spec.fixed.array.n_half));
            return pres;
        }
    }

    int Modulation::bits() const { return std::countr_zero(static_cast<unsigned>(order)); }

    void Modulation::validate() const
    {
        if (scheme == Scheme::PSK && !(order >= 2 && is_power_of_two(order)))
            throw ArgumentError("PSK order must be a power of two >= 2");
        if (scheme == Scheme::QAM && order != 4 && order != 16 && order != 64 && order != 256)
            throw ArgumentError("QAM order must be 4, 16, 64 or 256");
    }

    std::string_view to_string(Scheme s) { return s == Scheme::PSK ? "PSK" : "QAM"; }

    Scheme scheme_from_string(std::string_view s)
    {
        if (s == "PSK" || s == "psk")
            return Scheme::PSK;
        if (s == "QAM" || s == "qam")
            return Scheme::QAM;
        throw ArgumentError("unknown modulation scheme '" + std::string(s) + "'");
    }

    std::complex<double> modulate(int label, const Modulation &mod)
    {
        mod.validate();
        if (label < 0 || label >= mod.order)
            throw ArgumentError("modulate: symbol label out of range");
        if (mod.scheme == Scheme::PSK)
            return std::polar(1.0, 2.0 * std::numbers::pi * gray_inverse(label) / mod.order);

        const int side = qam_side(mod.order);
        const int half_bits = mod.bits() / 2;
        const double norm = std::sqrt(2.0 * (mod.order - 1) / 3.0);
        const int i = gray_inverse(label >> half_bits);
        const int q = gray_inverse(label & ((1 << half_bits) - 1));
        return {(2.0 * i - side + 1) / norm, (2.0 * q - side + 1) / norm};
    }

    int demodulate(std::complex<double> y, const Modulation &mod)
    {
        if (mod.scheme == Scheme::PSK)
        {
            double k = std::round(std::arg(y) * mod.order / (2.0 * std::numbers::pi));
            const int idx = static_cast<int>(((static_cast<long long>(k) % mod.order) + mod.order) % mod.order);
            return gray(idx);
        }
        const int side = qam_side(mod.order);
        const int half_bits = mod.bits() / 2;
        const double norm = std::sqrt(2.0 * (mod.order - 1) / 3.0);
        auto level = [&](double v)
        { return std::clamp(static_cast<int>(std::lround((v * norm + side - 1) / 2.0)), 0, side - 1); };
        return (gray(level(y.real())) << half_bits) | gray(level(y.imag()));
    }

    std::string_view to_string(Metric m)
    {
        switch (m)
        {
        case Metric::BerVsRange: return "ber_vs_range";
        case Metric::BerVsAzimuth: return "ber_vs_azimuth";
        case Metric::BerVsElevation: return "ber_vs_elevation";
        case Metric::BerVsSnr: return "ber_vs_snr";
        case Metric::SrVsLambdaB: return "sr_vs_lambda_b";
        case Metric::SrVsLambdaE: return "sr_vs_lambda_e";
        case Metric::SopVsLambdaB: return "sop_vs_lambda_b";
        case Metric::SopVsLambdaE: return "sop_vs_lambda_e";
        case Metric::MemoryVsN: return "memory_vs_n";
        case Metric::MemoryVsL: return "memory_vs_l";
        }
        return "?";
    }

    Metric metric_from_string(std::string_view s)
    {
        for (Metric m : {Metric::BerVsRange, Metric::BerVsAzimuth, Metric::BerVsElevation, Metric::BerVsSnr,
                         Metric::SrVsLambdaB, Metric::SrVsLambdaE, Metric::SopVsLambdaB, Metric::SopVsLambdaE,
                         Metric::MemoryVsN, Metric::MemoryVsL})
            if (to_string(m) == s)
                return m;
        throw ArgumentError("unknown sweep metric '" + std::string(s) + "'");
    }

    std::string_view sweep_variable(Metric m)
    {
        switch (m)
        {
        case Metric::BerVsRange: return "range";
        case Metric::BerVsAzimuth: return "azimuth";
        case Metric::BerVsElevation: return "elevation";
        case Metric::BerVsSnr: return "snr";
        case Metric::SrVsLambdaB:
        case Metric::SopVsLambdaB: return "lambda_b";
        case Metric::SrVsLambdaE:
        case Metric::SopVsLambdaE: return "lambda_e";
        case Metric::MemoryVsN: return "n_half";
        case Metric::MemoryVsL: return "subcarriers";
        }
        return "?";
    }

    std::string_view sweep_unit(Metric m)
    {
        switch (m)
        {
        case Metric::BerVsRange: return "m";
        case Metric::BerVsAzimuth:
        case Metric::BerVsElevation: return "deg";
        case Metric::MemoryVsN:
        case Metric::MemoryVsL: return "count";
        default: return "dB";
        }
    }

    void SweepSpec::validate() const
    {
        if (trials < 1)
            throw ArgumentError("sweep: trials must be >= 1");
        if (grid.empty())
            throw ArgumentError("sweep: grid must be nonempty");
        const bool up = grid.size() < 2 || grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
                throw ArgumentError("sweep: grid must be strictly monotone");
        if (methods.empty())
            throw ArgumentError("sweep: at least one method is required");
        modulation.validate();
        fixed.array.validate();
        fixed.bob.validate();
        fixed.eve.validate();
        if (!(fixed.beta1 > 0.0 && fixed.beta1 <= 1.0))
            throw ArgumentError("sweep: beta1 must lie in (0, 1]");
        if (!(fixed.ps > 0.0) || !(fixed.noise_var_b > 0.0) || !(fixed.noise_var_e > 0.0))
            throw ArgumentError("sweep: power and noise variances must be positive");
        if (!(fixed.r0 >= 0.0))
            throw ArgumentError("sweep: r0 must be non-negative");
        for (double g : grid)
        {
            switch (metric)
            {
            case Metric::BerVsRange:
                if (!(g > 0.0))
                    throw ArgumentError("sweep: range values must be positive");
                break;
            case Metric::BerVsAzimuth:
            case Metric::BerVsElevation:
                if (!(std::abs(g) <= 90.0))
                    throw ArgumentError("sweep: angles must lie in [-90, 90] degrees");
                break;
            case Metric::MemoryVsN:
            case Metric::MemoryVsL:
                if (!(g >= 1.0) || g != std::floor(g))
                    throw ArgumentError("sweep: N and L values must be positive integers");
                break;
            default:
                if (!std::isfinite(g))
                    throw ArgumentError("sweep: grid values must be finite");
            }
        }
    }

    std::mt19937_64 task_rng(std::uint64_t seed, std::size_t point, std::size_t method)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(point), static_cast<std::uint32_t>(method)};
        return std::mt19937_64(seq);
    }

    SweepResult run_ber_sweep(const SweepSpec &spec)
    {
        spec.validate();
        const Scenario &fx = spec.fixed;
        const bool snr_sweep = spec.metric == Metric::BerVsSnr;
        if (!snr_sweep && spec.metric != Metric::BerVsRange && spec.metric != Metric::BerVsAzimuth &&
            spec.metric != Metric::BerVsElevation)
            throw ArgumentError("run_ber_sweep: metric is not a BER sweep");

        const SteeringVector h_b = steering_vector(fx.array, fx.bob);
        const SteeringVector h_e = steering_vector(fx.array, fx.eve);
        const std::vector<PrecoderSet> pres = build_precoders(spec, h_b);
        const std::size_t n_methods = pres.size();
        const Modulation mod = spec.modulation;

        std::vector<std::vector<SweepPoint>> out(spec.grid.size() * n_methods);
        parallel_for(out.size(), spec.threads, [&](std::size_t task)
                     {
            const std::size_t gi = task / n_methods, mi = task % n_methods;
            const double x = spec.grid[gi];
            const PrecoderSet &pre = pres[mi];
            const PowerSplit split = split_for(pre.method(), fx.beta1);

            double snr_db = snr_sweep ? x : fx.snr_db;
            std::vector<ReceiverView> rx;
            if (snr_sweep)
            {
                rx.push_back(view("bob", h_b, pre));
                rx.push_back(view("eve", h_e, pre));
            }
            else
            {
                Position probe = fx.bob;
                if (spec.metric == Metric::BerVsRange)
                    probe.r = x;
                else if (spec.metric == Metric::BerVsAzimuth)
                    probe.theta = deg_to_rad(x);
                else
                    probe.psi = deg_to_rad(x);
                rx.push_back(view("probe", steering_vector(fx.array, probe), pre));
            }
            const double noise_var = fx.ps / db_to_linear(snr_db);
            const double noise_amp = std::sqrt(noise_var);
            const double signal_amp = split.beta1() * std::sqrt(fx.ps);
            const double beta2_amp = split.beta2() * std::sqrt(fx.ps);
            // Unit-mean-power fading when enabled; the receiver is coherent.
            FtrParams fading = fx.ftr_bob;
            fading.sigma2 = sigma_from_avg_snr(1.0, fading.K);

            std::mt19937_64 rng = task_rng(spec.seed, gi, mi);
            std::uniform_int_distribution<int> pick(0, mod.order - 1);
            std::normal_distribution<double> unit(0.0, 1.0);
            Eigen::VectorXcd z(pre.an_width());
            std::vector<std::int64_t> errors(rx.size(), 0);

            for (std::int64_t t = 0; t < spec.trials; ++t)
            {
                const int label = pick(rng);
                const std::complex<double> s = modulate(label, mod);
                for (Eigen::Index w = 0; w < z.size(); ++w)
                    z[w] = cgauss(rng, unit);
                const double an_norm = pre.an_width() > 0
                                           ? pre.an_norm_squared({z.data(), static_cast<std::size_t>(z.size())})
                                           : 0.0;
                for (std::size_t r = 0; r < rx.size(); ++r)
                {
                    const std::complex<double> eps = fx.ber_fading ? sample_coefficient(fading, rng) : 1.0;
                    const std::complex<double> clean = signal_amp * rx[r].signal_gain * s + an_at(rx[r], pre, z, an_norm, beta2_amp);
                    const std::complex<double> y = eps * clean + noise_amp * cgauss(rng, unit);
                    const int detected = demodulate(y / (eps * signal_amp), mod);
                    errors[r] += std::popcount(static_cast<unsigned>(label ^ detected));
                }
            }

            const double n_bits = static_cast<double>(spec.trials) * mod.bits();
            for (std::size_t r = 0; r < rx.size(); ++r)
            {
                SweepPoint p;
                p.x = x;
                p.method = pre.method();
                p.receiver = rx[r].name;
                p.quantity = "ber";
                const double ber = errors[r] / n_bits;
                p.mc_value = ber;
                p.mc_stderr = std::sqrt(ber * (1.0 - ber) / n_bits);
                if (spec.analytic && rx[r].name == "bob" && mod.scheme == Scheme::PSK && !fx.ber_fading)
                    p.analytic_value = ber_mpsk(split.beta1() * split.beta1() * db_to_linear(snr_db), mod.order);
                out[task].push_back(std::move(p));
            } });

        SweepResult result{spec.metric, {}};
        for (auto &v : out)
            for (auto &p : v)
                result.points.push_back(std::move(p));
        return result;
    }

    SweepResult run_secrecy_sweep(const SweepSpec &spec)
    {
        spec.validate();
        const Scenario &fx = spec.fixed;
        const bool sop_metric = spec.metric == Metric::SopVsLambdaB || spec.metric == Metric::SopVsLambdaE;
        const bool sweep_bob = spec.metric == Metric::SrVsLambdaB || spec.metric == Metric::SopVsLambdaB;
        if (!sop_metric && spec.metric != Metric::SrVsLambdaB && spec.metric != Metric::SrVsLambdaE)
            throw ArgumentError("run_secrecy_sweep: metric is not a secrecy sweep");

        const SteeringVector h_b = steering_vector(fx.array, fx.bob);
        const SteeringVector h_e = steering_vector(fx.array, fx.eve);
        const std::vector<PrecoderSet> pres = build_precoders(spec, h_b);
        const std::size_t n_methods = pres.size();

        std::vector<SweepPoint> out(spec.grid.size() * n_methods);
        parallel_for(out.size(), spec.threads, [&](std::size_t task)
                     {
            const std::size_t gi = task / n_methods, mi = task % n_methods;
            const double x = spec.grid[gi];
            const PrecoderSet &pre = pres[mi];
            const PowerSplit split = split_for(pre.method(), fx.beta1);
            const EveGains gains = eve_gains(h_e, pre, split);
            const ReceiverView eve_view = view("eve", h_e, pre);

            const double avg_b = db_to_linear(sweep_bob ? x : fx.lambda_b_db);
            const double avg_e = db_to_linear(sweep_bob ? fx.lambda_e_db : x);
            // Channel coefficients for the sampler, and the SNR-domain laws for the analytics.
            FtrParams coef_b = fx.ftr_bob, coef_e = fx.ftr_eve;
            coef_b.sigma2 = sigma_from_avg_snr(avg_b, coef_b.K, fx.ps, fx.noise_var_b);
            coef_e.sigma2 = sigma_from_avg_snr(avg_e, coef_e.K, fx.ps, fx.noise_var_e);
            FtrParams snr_b = fx.ftr_bob, snr_e = fx.ftr_eve;
            snr_b.sigma2 = sigma_from_avg_snr(avg_b, snr_b.K);
            snr_e.sigma2 = sigma_from_avg_snr(avg_e, snr_e.K);

            const double b1sq = split.beta1() * split.beta1();
            const double b2sq = split.beta2() * split.beta2();
            const bool explicit_an = pre.method() == Method::ZF || pre.method() == Method::SVD;

            std::mt19937_64 rng = task_rng(spec.seed, gi, mi);
            std::normal_distribution<double> unit(0.0, 1.0);
            Eigen::VectorXcd z(pre.an_width());
            double sum = 0.0, sum_sq = 0.0;
            for (std::int64_t t = 0; t < spec.trials; ++t)
            {
                const double lambda_b = std::norm(sample_coefficient(coef_b, rng)) * fx.ps / fx.noise_var_b;
                const double lambda_e = std::norm(sample_coefficient(coef_e, rng)) * fx.ps / fx.noise_var_e;
                const double gamma_b = b1sq * lambda_b;
                double gamma_e;
                if (explicit_an)
                {
                    for (Eigen::Index w = 0; w < z.size(); ++w)
                        z[w] = cgauss(rng, unit);
                    const double an_norm = pre.an_norm_squared({z.data(), static_cast<std::size_t>(z.size())});
                    const double leak = an_norm > 0.0 ? std::norm(std::complex<double>(eve_view.an_row * z)) / an_norm : 0.0;
                    gamma_e = gains.eta * lambda_e / (b2sq * leak * lambda_e + 1.0);
                }
                else
                    gamma_e = eve_sinr(lambda_e, gains);
                const double rate = std::log2((1.0 + gamma_b) / (1.0 + gamma_e));
                const double v = sop_metric ? (rate < fx.r0 ? 1.0 : 0.0) : std::max(0.0, rate);
                sum += v;
                sum_sq += v * v;
            }

            const double n = static_cast<double>(spec.trials);
            const double mean = sum / n;
            SweepPoint p;
            p.x = x;
            p.method = pre.method();
            p.receiver = "bob";
            p.quantity = sop_metric ? "sop" : "sr";
            p.mc_value = mean;
            p.mc_stderr = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
            if (spec.analytic)
            {
                const double beta1 = split.beta1();
                if (sop_metric)
                {
                    p.analytic_value = sop(snr_b, snr_e, beta1, gains, fx.r0, spec.series, spec.quadrature).value;
                    if (!gains.degenerate())
                        p.bound_value = sop_upper_bound(snr_b, beta1, gains.tau, fx.r0, spec.series);
                }
                else
                {
                    p.analytic_value = avg_secrecy_rate(snr_b, snr_e, beta1, gains, spec.series, spec.quadrature).value;
                    if (!gains.degenerate())
                        p.bound_value = sr_lower_bound(snr_b, beta1, gains.tau, spec.series, spec.quadrature);
                }
            }
            out[task] = std::move(p); });

        return {spec.metric, std::move(out)};
    }

    SweepResult run_memory_sweep(const SweepSpec &spec)
    {
        spec.validate();
        if (spec.metric != Metric::MemoryVsN && spec.metric != Metric::MemoryVsL)
            throw ArgumentError("run_memory_sweep: metric is not a memory sweep");
        SweepResult result{spec.metric, {}};
        for (double x : spec.grid)
        {
            const int n = spec.metric == Metric::MemoryVsN ? static_cast<int>(x) : spec.fixed.array.n_half;
            const int l = spec.metric == Metric::MemoryVsL ? static_cast<int>(x) : spec.fixed.array.subcarriers;
            for (Method m : spec.methods)
            {
                SweepPoint p;
                p.x = x;
                p.method = m;
                p.quantity = "memory_total";
                p.analytic_value = static_cast<double>(memory_footprint(m, n, l).total);
                result.points.push_back(std::move(p));
            }
            const double sp = static_cast<double>(memory_footprint(Method::SP, n, l).total);
            for (auto [name, other] : {std::pair{"ratio_sp_zf", Method::ZF}, std::pair{"ratio_sp_svd", Method::SVD}})
            {
                SweepPoint p;
                p.x = x;
                p.method = Method::SP;
                p.quantity = name;
                p.analytic_value = sp / static_cast<double>(memory_footprint(other, n, l).total);
                result.points.push_back(std::move(p));
            }
        }
        return result;
    }

    SweepResult run_sweep(const SweepSpec &spec)
    {
        switch (spec.metric)
        {
        case Metric::BerVsRange:
        case Metric::BerVsAzimuth:
        case Metric::BerVsElevation:
        case Metric::BerVsSnr:
            return run_ber_sweep(spec);
        case Metric::SrVsLambdaB:
        case Metric::SrVsLambdaE:
        case Metric::SopVsLambdaB:
        case Metric::SopVsLambdaE:
            return run_secrecy_sweep(spec);
        case Metric::MemoryVsN:
        case Metric::MemoryVsL:
            return run_memory_sweep(spec);
        }
        throw ArgumentError("unknown sweep metric");
    }
}
