// SPDX-License-Identifier: Apache-2.0

#include "fdadm/cli.hpp"
#include "fdadm/link_model.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

namespace fdadm
{
    namespace
    {
        std::string trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return std::string(s.substr(b, e - b + 1));
        }

        std::string format_value(double v)
        {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        }
        std::string format_value(bool v) { return v ? "true" : "false"; }
        template <class I>
            requires std::is_integral_v<I>
        std::string format_value(I v) { return std::to_string(v); }

        [[noreturn]] void bad_value(std::string_view key, std::string_view what, std::string_view got)
        {
            throw ConfigError("config key '" + std::string(key) + "': expected " + std::string(what) + ", got '" +
                              std::string(got) + "'");
        }

        template <class T>
        T parse_value(std::string_view key, std::string_view text)
        {
            if constexpr (std::is_same_v<T, bool>)
            {
                if (text == "true")
                    return true;
                if (text == "false")
                    return false;
                bad_value(key, "true or false", text);
            }
            else
            {
                T v{};
                const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
                if (res.ec != std::errc() || res.ptr != text.data() + text.size())
                    bad_value(key, std::is_floating_point_v<T> ? "a number" : "an integer", text);
                return v;
            }
        }

        struct Entry
        {
            std::string key;
            std::function<std::string(const ExperimentConfig &)> get;
            std::function<void(ExperimentConfig &, std::string_view)> set;
        };

        template <class Access>
        Entry field(std::string key, Access access)
        {
            return {key, [access](const ExperimentConfig &c)
                    { return format_value(access(c)); },
                    [access, key](ExperimentConfig &c, std::string_view v)
                    {
                        auto &ref = access(c);
                        ref = parse_value<std::remove_reference_t<decltype(ref)>>(key, v);
                    }};
        }

#define FDADM_FIELD(key, expr) field(key, [](auto &c) -> auto & { return expr; })

        const std::vector<Entry> &registry()
        {
            static const std::vector<Entry> entries = {
                FDADM_FIELD("array.n_half", c.array.n_half),
                FDADM_FIELD("array.subcarriers", c.array.subcarriers),
                FDADM_FIELD("array.f0", c.array.f0),
                FDADM_FIELD("array.delta_f", c.array.delta_f),
                FDADM_FIELD("array.spacing", c.array.spacing),
                FDADM_FIELD("array.c", c.array.c),
                FDADM_FIELD("bob.range", c.bob.range),
                FDADM_FIELD("bob.azimuth_deg", c.bob.azimuth_deg),
                FDADM_FIELD("bob.elevation_deg", c.bob.elevation_deg),
                FDADM_FIELD("eve.range", c.eve.range),
                FDADM_FIELD("eve.azimuth_deg", c.eve.azimuth_deg),
                FDADM_FIELD("eve.elevation_deg", c.eve.elevation_deg),
                FDADM_FIELD("ftr_bob.m", c.ftr_bob.m),
                FDADM_FIELD("ftr_bob.K", c.ftr_bob.K),
                FDADM_FIELD("ftr_bob.delta", c.ftr_bob.delta),
                FDADM_FIELD("ftr_eve.m", c.ftr_eve.m),
                FDADM_FIELD("ftr_eve.K", c.ftr_eve.K),
                FDADM_FIELD("ftr_eve.delta", c.ftr_eve.delta),
                FDADM_FIELD("power.ps", c.ps),
                FDADM_FIELD("power.beta1", c.beta1),
                FDADM_FIELD("power.noise_var_b", c.noise_var_b),
                FDADM_FIELD("power.noise_var_e", c.noise_var_e),
                FDADM_FIELD("link.snr_db", c.snr_db),
                FDADM_FIELD("link.lambda_b_db", c.lambda_b_db),
                FDADM_FIELD("link.lambda_e_db", c.lambda_e_db),
                FDADM_FIELD("link.r0", c.r0),
                FDADM_FIELD("link.ber_fading", c.ber_fading),
                FDADM_FIELD("series.max_terms", c.series.max_terms),
                FDADM_FIELD("series.rel_tol", c.series.rel_tol),
                FDADM_FIELD("series.delta_limit", c.series.delta_limit),
                FDADM_FIELD("quadrature.rel_tol", c.quadrature.rel_tol),
                FDADM_FIELD("quadrature.max_subdivisions", c.quadrature.max_subdivisions),
                FDADM_FIELD("run.trials", c.trials),
                FDADM_FIELD("run.seed", c.seed),
                FDADM_FIELD("run.threads", c.threads),
                Entry{"modulation.scheme",
                      [](const ExperimentConfig &c)
                      { return std::string(to_string(c.modulation.scheme)); },
                      [](ExperimentConfig &c, std::string_view v)
                      {
                          try
                          {
                              c.modulation.scheme = scheme_from_string(v);
                          }
                          catch (const ArgumentError &)
                          {
                              bad_value("modulation.scheme", "PSK or QAM", v);
                          }
                      }},
                FDADM_FIELD("modulation.order", c.modulation.order),
            };
            return entries;
        }

#undef FDADM_FIELD

        template <class F>
        void check_section(const char *section, F &&f)
        {
            try
            {
                f();
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const Error &e)
            {
                throw ConfigError("config section '" + std::string(section) + "': " + e.what());
            }
        }

        int method_rank(std::string_view m)
        {
            for (int i = 0; Method x : {Method::SP, Method::ZF, Method::SVD, Method::NoAN})
            {
                if (to_string(x) == m)
                    return i;
                ++i;
            }
            return 4;
        }

        int estimator_rank(std::string_view e)
        {
            if (e == "mc")
                return 0;
            if (e == "analytic")
                return 1;
            if (e == "lower_bound")
                return 2;
            return 3;
        }

        std::string format_number(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        const char *csv_header = "experiment_id,metric,method,receiver,quantity,sweep_variable,sweep_unit,sweep_value,"
                                 "estimator,value,stderr,seed,config_hash";

        std::vector<std::string> split_csv_line(std::string_view line)
        {
            std::vector<std::string> cells;
            std::size_t start = 0;
            while (true)
            {
                const auto comma = line.find(',', start);
                cells.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
                if (comma == std::string_view::npos)
                    break;
                start = comma + 1;
            }
            return cells;
        }

        double parse_double(const std::string &s)
        {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size())
                throw ArgumentError("csv: malformed number '" + s + "'");
            return v;
        }
    }

    Position PositionDeg::to_position() const { return {range, deg_to_rad(azimuth_deg), deg_to_rad(elevation_deg)}; }

    Scenario ExperimentConfig::scenario() const
    {
        Scenario s;
        s.array = array;
        s.bob = bob.to_position();
        s.eve = eve.to_position();
        s.ftr_bob = ftr_bob;
        s.ftr_eve = ftr_eve;
        s.ps = ps;
        s.beta1 = beta1;
        s.noise_var_b = noise_var_b;
        s.noise_var_e = noise_var_e;
        s.snr_db = snr_db;
        s.lambda_b_db = lambda_b_db;
        s.lambda_e_db = lambda_e_db;
        s.r0 = r0;
        s.ber_fading = ber_fading;
        return s;
    }

    void ExperimentConfig::validate() const
    {
        check_section("array", [&]
                      { array.validate(); });
        check_section("bob", [&]
                      { bob.to_position().validate(); });
        check_section("eve", [&]
                      { eve.to_position().validate(); });
        check_section("ftr_bob", [&]
                      { ftr_bob.validate(); });
        check_section("ftr_eve", [&]
                      { ftr_eve.validate(); });
        check_section("power", [&]
                      {
            (void)PowerSplit(beta1);
            if (!(ps > 0.0) || !(noise_var_b > 0.0) || !(noise_var_e > 0.0))
                throw ArgumentError("ps and noise variances must be positive"); });
        check_section("link", [&]
                      {
            if (!std::isfinite(snr_db) || !std::isfinite(lambda_b_db) || !std::isfinite(lambda_e_db))
                throw ArgumentError("SNRs must be finite");
            if (!(r0 >= 0.0))
                throw ArgumentError("r0 must be non-negative"); });
        check_section("series", [&]
                      { series.validate(); });
        check_section("quadrature", [&]
                      { quadrature.validate(); });
        check_section("run", [&]
                      {
            if (trials < 1)
                throw ArgumentError("trials must be >= 1"); });
        check_section("modulation", [&]
                      { modulation.validate(); });
    }

    std::vector<std::string> config_keys()
    {
        std::vector<std::string> keys;
        for (const Entry &e : registry())
            keys.push_back(e.key);
        return keys;
    }

    std::string dump_config(const ExperimentConfig &cfg)
    {
        std::string out;
        for (const Entry &e : registry())
            out += e.key + " = " + e.get(cfg) + "\n";
        return out;
    }

    void set_config_value(ExperimentConfig &cfg, std::string_view key, std::string_view value)
    {
        for (const Entry &e : registry())
            if (e.key == key)
            {
                e.set(cfg, trim(value));
                return;
            }
        throw ConfigError("config key '" + std::string(key) + "': unknown key");
    }

    ExperimentConfig parse_config(std::string_view text)
    {
        ExperimentConfig cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        int line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const std::string body = trim(line);
            if (body.empty())
                continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
            set_config_value(cfg, trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
        }
        cfg.validate();
        return cfg;
    }

    ExperimentConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("config file '" + path.string() + "' cannot be read");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::string config_hash(const ExperimentConfig &cfg)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : dump_config(cfg))
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    SweepSpec make_sweep_spec(const ExperimentConfig &cfg, Metric metric, std::vector<double> grid,
                              std::vector<Method> methods)
    {
        SweepSpec s;
        s.metric = metric;
        s.grid = std::move(grid);
        s.methods = std::move(methods);
        s.trials = cfg.trials;
        s.seed = cfg.seed;
        s.modulation = cfg.modulation;
        s.fixed = cfg.scenario();
        s.series = cfg.series;
        s.quadrature = cfg.quadrature;
        s.threads = cfg.threads;
        s.validate();
        return s;
    }

    std::vector<OutputRecord> to_records(const SweepResult &result, const std::string &experiment_id,
                                         std::uint64_t seed, const std::string &hash)
    {
        std::vector<OutputRecord> out;
        for (const SweepPoint &p : result.points)
        {
            OutputRecord base;
            base.experiment_id = experiment_id;
            base.method = std::string(to_string(p.method));
            base.sweep_variable = std::string(sweep_variable(result.metric));
            base.sweep_unit = std::string(sweep_unit(result.metric));
            base.sweep_value = p.x;
            base.metric = std::string(to_string(result.metric));
            base.quantity = p.quantity;
            base.receiver = p.receiver;
            base.seed = seed;
            base.config_hash = hash;
            auto add = [&](const char *estimator, double value, std::optional<double> se)
            {
                OutputRecord r = base;
                r.estimator = estimator;
                r.value = value;
                r.stderr_value = se;
                out.push_back(std::move(r));
            };
            if (p.mc_value)
                add("mc", *p.mc_value, p.mc_stderr);
            if (p.analytic_value)
                add("analytic", *p.analytic_value, std::nullopt);
            if (p.bound_value)
                add(p.quantity == "sop" ? "upper_bound" : "lower_bound", *p.bound_value, std::nullopt);
        }
        return out;
    }

    void sort_records(std::vector<OutputRecord> &records)
    {
        std::stable_sort(records.begin(), records.end(), [](const OutputRecord &a, const OutputRecord &b)
                         {
            if (a.sweep_value != b.sweep_value)
                return a.sweep_value < b.sweep_value;
            if (const int ma = method_rank(a.method), mb = method_rank(b.method); ma != mb)
                return ma < mb;
            return estimator_rank(a.estimator) < estimator_rank(b.estimator); });
    }

    std::string format_csv(const std::vector<OutputRecord> &records)
    {
        std::string out = std::string(csv_header) + "\n";
        for (const OutputRecord &r : records)
        {
            out += r.experiment_id + "," + r.metric + "," + r.method + "," + r.receiver + "," + r.quantity + "," +
                   r.sweep_variable + "," + r.sweep_unit + "," + format_number(r.sweep_value) + "," + r.estimator +
                   "," + format_number(r.value) + "," + (r.stderr_value ? format_number(*r.stderr_value) : "") +
                   "," + std::to_string(r.seed) + "," + r.config_hash + "\n";
        }
        return out;
    }

    std::vector<OutputRecord> parse_csv(std::string_view text)
    {
        std::istringstream in{std::string(text)};
        std::string line;
        if (!std::getline(in, line) || trim(line) != csv_header)
            throw ArgumentError("csv: missing or unexpected header");
        std::vector<OutputRecord> out;
        while (std::getline(in, line))
        {
            if (trim(line).empty())
                continue;
            const auto c = split_csv_line(trim(line));
            if (c.size() != 13)
                throw ArgumentError("csv: expected 13 fields, got " + std::to_string(c.size()));
            OutputRecord r;
            r.experiment_id = c[0];
            r.metric = c[1];
            r.method = c[2];
            r.receiver = c[3];
            r.quantity = c[4];
            r.sweep_variable = c[5];
            r.sweep_unit = c[6];
            r.sweep_value = parse_double(c[7]);
            r.estimator = c[8];
            r.value = parse_double(c[9]);
            if (!c[10].empty())
                r.stderr_value = parse_double(c[10]);
            r.seed = std::stoull(c[11]);
            r.config_hash = c[12];
            out.push_back(std::move(r));
        }
        return out;
    }

    void emit_csv(const std::vector<OutputRecord> &records, const std::filesystem::path &path)
    {
        if (records.empty())
            throw ArgumentError("emit_csv: no records");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ArgumentError("cannot write '" + path.string() + "'");
        out << format_csv(records);
        if (!out)
            throw ArgumentError("write to '" + path.string() + "' failed");
    }

    void emit_json(const std::vector<OutputRecord> &records, const std::filesystem::path &path)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const OutputRecord &r : records)
        {
            nlohmann::json j = {{"experiment_id", r.experiment_id}, {"metric", r.metric},
                                {"method", r.method}, {"receiver", r.receiver},
                                {"quantity", r.quantity}, {"sweep_variable", r.sweep_variable},
                                {"sweep_unit", r.sweep_unit}, {"sweep_value", r.sweep_value},
                                {"estimator", r.estimator}, {"value", r.value},
                                {"seed", r.seed}, {"config_hash", r.config_hash}};
            j["stderr"] = r.stderr_value ? nlohmann::json(*r.stderr_value) : nlohmann::json(nullptr);
            rows.push_back(std::move(j));
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ArgumentError("cannot write '" + path.string() + "'");
        out << rows.dump(2) << "\n";
    }

    std::vector<SuiteResult> run_validation(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::vector<SuiteResult> suites;
        char buf[256];

        {
            SuiteResult s{"precoder_orthogonality", true, {}, {}};
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> range(100.0, 5000.0), angle(-M_PI / 2, M_PI / 2);
            double worst = 0.0;
            for (int i = 0; i < 100; ++i)
            {
                const Position pos{range(rng), angle(rng), angle(rng)};
                const SteeringVector h = steering_vector(cfg.array, pos);
                for (Method m : {Method::SP, Method::ZF, Method::SVD})
                {
                    const PrecoderSet pre = design_precoder(m, h, cfg.array.n_half);
                    double leak = 0.0;
                    if (pre.an_width() > 0)
                        leak = (h.entries().adjoint() * pre.an_basis()).cwiseAbs().maxCoeff();
                    const double p1 = std::abs(h.inner(pre.p1()) - 1.0);
                    worst = std::max({worst, leak, p1});
                    if (leak > 1e-10 || p1 > 1e-10)
                    {
                        std::snprintf(buf, sizeof buf, "%s at position %d: leak %.3g, |h^H p1 - 1| %.3g",
                                      std::string(to_string(m)).c_str(), i, leak, p1);
                        s.failures.push_back(buf);
                    }
                }
            }
            std::snprintf(buf, sizeof buf, "worst residual %.3g over 100 positions", worst);
            s.summary = buf;
            suites.push_back(std::move(s));
        }

        {
            SuiteResult s{"ftr_ks", true, {}, {}};
            const std::size_t n = static_cast<std::size_t>(std::min<std::int64_t>(cfg.trials, 1000000));
            // 0.01 at 1e5 samples, widened to the 1% KS critical value for smaller runs.
            const double limit = std::max(0.01, 1.63 / std::sqrt(static_cast<double>(n)));
            int idx = 0;
            for (const FtrParams &p : {cfg.ftr_bob, cfg.ftr_eve})
            {
                const char *who = idx == 0 ? "ftr_bob" : "ftr_eve";
                const FtrSeries series(p, cfg.series);
                const double total = std::accumulate(series.weights().begin(), series.weights().end(), 0.0);
                std::mt19937_64 rng = task_rng(cfg.seed, 0, static_cast<std::size_t>(idx));
                std::vector<double> x(n);
                for (double &v : x)
                    v = std::norm(sample_coefficient(p, rng));
                std::sort(x.begin(), x.end());
                double ks = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    const double f = series.cdf(x[i]);
                    ks = std::max({ks, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
                }
                if (ks > limit)
                {
                    std::snprintf(buf, sizeof buf, "%s: KS distance %.4f exceeds %.4f", who, ks, limit);
                    s.failures.push_back(buf);
                }
                if (std::abs(total - 1.0) > 1e-6)
                {
                    std::snprintf(buf, sizeof buf, "%s: weight sum deviates from 1 by %.3g", who, total - 1.0);
                    s.failures.push_back(buf);
                }
                std::snprintf(buf, sizeof buf, "%s%s KS %.4f", s.summary.empty() ? "" : ", ", who, ks);
                s.summary += buf;
                ++idx;
            }
            suites.push_back(std::move(s));
        }

        {
            SuiteResult s{"psi_identity", true, {}, {}};
            double worst = 0.0;
            for (int u = 1; u <= 5; ++u)
                for (double v : {0.25, 0.5, 1.0, 2.0, 5.0})
                {
                    const double q = psi_integral(1, u - 1, 0.0, v, 0.0, INFINITY, cfg.quadrature);
                    const double rel = std::abs(q - s_closed(u, v)) / std::abs(s_closed(u, v));
                    worst = std::max(worst, rel);
                    if (rel > 1e-6)
                    {
                        std::snprintf(buf, sizeof buf, "u=%d v=%g: relative difference %.3g", u, v, rel);
                        s.failures.push_back(buf);
                    }
                }
            std::snprintf(buf, sizeof buf, "worst relative difference %.3g", worst);
            s.summary = buf;
            suites.push_back(std::move(s));
        }

        const std::vector<double> grid{5.0, 10.0, 15.0, 20.0};
        const SweepResult sr = run_sweep(make_sweep_spec(cfg, Metric::SrVsLambdaB, grid, {Method::SP}));
        const SweepResult op = run_sweep(make_sweep_spec(cfg, Metric::SopVsLambdaB, grid, {Method::SP}));
        ExperimentConfig higher = cfg;
        higher.r0 = cfg.r0 + 0.5;
        const SweepResult op_hi = run_sweep(make_sweep_spec(higher, Metric::SopVsLambdaB, grid, {Method::SP}));

        auto agreement = [&](const char *name, const SweepResult &r, double floor)
        {
            SuiteResult s{name, true, {}, {}};
            double worst = 0.0;
            for (const SweepPoint &p : r.points)
            {
                const double diff = std::abs(*p.analytic_value - *p.mc_value);
                const double tol = std::max(3.0 * p.mc_stderr, floor);
                worst = std::max(worst, diff / tol);
                if (diff > tol)
                {
                    std::snprintf(buf, sizeof buf, "lambda_b %g dB: analytic %.6g, MC %.6g (tolerance %.3g)", p.x,
                                  *p.analytic_value, *p.mc_value, tol);
                    s.failures.push_back(buf);
                }
            }
            std::snprintf(buf, sizeof buf, "worst |analytic - MC| / tolerance %.3f", worst);
            s.summary = buf;
            return s;
        };
        suites.push_back(agreement("secrecy_rate_vs_mc", sr, 0.05));
        suites.push_back(agreement("sop_vs_mc", op, 0.01));

        {
            SuiteResult s{"bound_ordering", true, {}, {}};
            for (const SweepPoint &p : sr.points)
                if (p.bound_value && !(*p.analytic_value >= *p.bound_value))
                {
                    std::snprintf(buf, sizeof buf, "lambda_b %g dB: SR %.6g below lower bound %.6g", p.x,
                                  *p.analytic_value, *p.bound_value);
                    s.failures.push_back(buf);
                }
            for (std::size_t i = 0; i < op.points.size(); ++i)
            {
                const SweepPoint &p = op.points[i];
                if (p.bound_value && !(*p.analytic_value <= *p.bound_value))
                {
                    std::snprintf(buf, sizeof buf, "lambda_b %g dB: SOP %.6g above upper bound %.6g", p.x,
                                  *p.analytic_value, *p.bound_value);
                    s.failures.push_back(buf);
                }
                if (!(*p.analytic_value <= *op_hi.points[i].analytic_value))
                {
                    std::snprintf(buf, sizeof buf, "lambda_b %g dB: SOP decreases when r0 grows", p.x);
                    s.failures.push_back(buf);
                }
            }
            s.summary = "SR >= lower bound, SOP <= upper bound, SOP nondecreasing in r0";
            suites.push_back(std::move(s));
        }

        for (SuiteResult &s : suites)
            s.passed = s.failures.empty();
        return suites;
    }
}
