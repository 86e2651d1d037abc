// SPDX-License-Identifier: Apache-2.0
//
// fdadm: batch runner for the sweeps and the validation suites.
//
// Exit codes: 0 ok, 1 usage or config error, 2 numerical or convergence failure,
// 3 validation failure.

#include "fdadm/cli.hpp"
#include "fdadm/error.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

using namespace fdadm;

namespace
{
    struct GridArgs
    {
        std::vector<double> grid;
        double from = NAN, to = NAN, step = NAN;
    };

    std::vector<double> resolve_grid(const GridArgs &g, double from, double to, double step)
    {
        if (!g.grid.empty())
            return g.grid;
        from = std::isnan(g.from) ? from : g.from;
        to = std::isnan(g.to) ? to : g.to;
        step = std::isnan(g.step) ? step : g.step;
        if (!(step > 0.0) || !(to >= from))
            throw ArgumentError("grid: need --from <= --to and --step > 0");
        std::vector<double> out;
        const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
        for (long i = 0; i <= n; ++i)
            out.push_back(from + static_cast<double>(i) * step);
        return out;
    }

    void add_grid_options(CLI::App *cmd, GridArgs &g)
    {
        cmd->add_option("--grid", g.grid, "Explicit grid values")->delimiter(',');
        cmd->add_option("--from", g.from, "First grid value");
        cmd->add_option("--to", g.to, "Last grid value (inclusive)");
        cmd->add_option("--step", g.step, "Grid step");
    }

    std::vector<Method> parse_methods(const std::vector<std::string> &names)
    {
        std::vector<Method> out;
        for (const auto &n : names)
            out.push_back(method_from_string(n));
        return out;
    }

    std::string utc_timestamp()
    {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
        return buf;
    }

    std::filesystem::path output_dir(const std::string &flag)
    {
        if (!flag.empty())
            return flag;
        if (const char *env = std::getenv("FDADM_OUTPUT_DIR"); env && *env)
            return env;
        return ".";
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"FDA directional modulation secrecy toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_flag;
    std::vector<std::string> overrides;
    bool json = false;
    app.add_option("-c,--config", config_path, "Config file (flat key = value)");
    app.add_option("--set", overrides, "Override a config key, e.g. --set power.beta1=0.7");
    app.add_option("-o,--output-dir", out_flag, "Output directory (default: $FDADM_OUTPUT_DIR or .)");
    app.add_flag("--json", json, "Also write a JSON copy of the records");

    // ber
    auto *ber = app.add_subcommand("ber", "Bit error rate vs position or SNR");
    std::string ber_sweep = "snr";
    GridArgs ber_grid;
    std::vector<std::string> ber_methods{"SP", "ZF", "SVD"};
    ber->add_option("--sweep", ber_sweep, "range, azimuth, elevation or snr")
        ->check(CLI::IsMember({"range", "azimuth", "elevation", "snr"}));
    ber->add_option("--methods", ber_methods, "Precoders")->delimiter(',');
    add_grid_options(ber, ber_grid);

    // secrecy-rate and sop share their options
    struct SecrecyArgs
    {
        std::string sweep = "lambda_b";
        GridArgs grid;
        std::vector<std::string> methods{"SP", "ZF", "SVD", "NoAN"};
        bool no_analytic = false;
    } sr_args, sop_args;
    auto secrecy_options = [](CLI::App *cmd, SecrecyArgs &a)
    {
        cmd->add_option("--sweep", a.sweep, "lambda_b or lambda_e (average SNR in dB)")
            ->check(CLI::IsMember({"lambda_b", "lambda_e"}));
        cmd->add_option("--methods", a.methods, "Precoders")->delimiter(',');
        cmd->add_flag("--no-analytic", a.no_analytic, "Skip the series and bound columns");
        add_grid_options(cmd, a.grid);
    };
    auto *sr = app.add_subcommand("secrecy-rate", "Average secrecy rate vs average SNR");
    secrecy_options(sr, sr_args);
    auto *sopc = app.add_subcommand("sop", "Secrecy outage probability vs average SNR");
    secrecy_options(sopc, sop_args);
    double r0_flag = NAN;
    sopc->add_option("--r0", r0_flag, "Target secrecy rate [bits/s/Hz]");

    // memory
    auto *mem = app.add_subcommand("memory", "Stored complex scalars per precoder");
    int n_max = 25, l_fixed = 7, l_max = 0, n_fixed = 10;
    std::vector<std::string> mem_methods{"SP", "ZF", "SVD"};
    mem->add_option("--n-max", n_max, "Sweep N = 1..n-max at fixed L");
    mem->add_option("--l", l_fixed, "Fixed L for the N sweep");
    mem->add_option("--l-max", l_max, "Sweep L = 1..l-max at fixed N instead");
    mem->add_option("--n", n_fixed, "Fixed N for the L sweep");
    mem->add_option("--methods", mem_methods, "Precoders")->delimiter(',');

    auto *val = app.add_subcommand("validate", "Run the invariant suites; exit 3 on any failure");
    auto *dump = app.add_subcommand("dump-config", "Print the effective configuration");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        for (const auto &kv : overrides)
        {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (sopc->parsed() && !std::isnan(r0_flag))
            cfg.r0 = r0_flag;
        if (mem->parsed())
        {
            if (l_max > 0)
                cfg.array.n_half = n_fixed;
            else
                cfg.array.subcarriers = l_fixed;
        }
        cfg.validate();

        if (dump->parsed())
        {
            std::cout << dump_config(cfg);
            return 0;
        }

        if (val->parsed())
        {
            bool ok = true;
            for (const SuiteResult &s : run_validation(cfg))
            {
                std::cout << s.suite << ": " << (s.passed ? "PASS" : "FAIL") << " (" << s.summary << ")\n";
                for (const auto &f : s.failures)
                    std::cout << "  - " << f << "\n";
                ok = ok && s.passed;
            }
            return ok ? 0 : 3;
        }

        std::string sub;
        SweepSpec spec;
        if (ber->parsed())
        {
            sub = "ber";
            Metric metric = Metric::BerVsSnr;
            std::vector<double> grid;
            if (ber_sweep == "range")
            {
                metric = Metric::BerVsRange;
                grid = resolve_grid(ber_grid, 50.0, 2000.0, 50.0);
            }
            else if (ber_sweep == "azimuth")
            {
                metric = Metric::BerVsAzimuth;
                grid = resolve_grid(ber_grid, -90.0, 90.0, 1.0);
            }
            else if (ber_sweep == "elevation")
            {
                metric = Metric::BerVsElevation;
                grid = resolve_grid(ber_grid, -90.0, 90.0, 1.0);
            }
            else
                grid = resolve_grid(ber_grid, 0.0, 20.0, 2.0);
            spec = make_sweep_spec(cfg, metric, grid, parse_methods(ber_methods));
        }
        else if (sr->parsed() || sopc->parsed())
        {
            const bool is_sop = sopc->parsed();
            const SecrecyArgs &a = is_sop ? sop_args : sr_args;
            sub = is_sop ? "sop" : "secrecy-rate";
            const bool over_b = a.sweep == "lambda_b";
            const Metric metric = is_sop ? (over_b ? Metric::SopVsLambdaB : Metric::SopVsLambdaE)
                                         : (over_b ? Metric::SrVsLambdaB : Metric::SrVsLambdaE);
            spec = make_sweep_spec(cfg, metric, resolve_grid(a.grid, 0.0, 30.0, 5.0), parse_methods(a.methods));
            spec.analytic = !a.no_analytic;
        }
        else if (mem->parsed())
        {
            sub = "memory";
            const bool over_l = l_max > 0;
            const int hi = over_l ? l_max : n_max;
            if (hi < 1)
                throw ArgumentError("memory: --n-max and --l-max must be >= 1");
            std::vector<double> grid;
            for (int i = 1; i <= hi; ++i)
                grid.push_back(i);
            spec = make_sweep_spec(cfg, over_l ? Metric::MemoryVsL : Metric::MemoryVsN, grid,
                                   parse_methods(mem_methods));
        }

        const std::string hash = config_hash(cfg);
        const std::string id = sub + "-" + hash + "-" + utc_timestamp();
        const SweepResult result = run_sweep(spec);
        std::vector<OutputRecord> records = to_records(result, id, cfg.seed, hash);
        sort_records(records);

        const std::filesystem::path dir = output_dir(out_flag);
        std::filesystem::create_directories(dir);
        const std::filesystem::path csv = dir / (id + ".csv");
        emit_csv(records, csv);
        if (json)
            emit_json(records, dir / (id + ".json"));
        std::cout << sub << ": " << to_string(result.metric) << ", " << spec.grid.size() << " points x "
                  << spec.methods.size() << " methods, " << records.size() << " rows -> " << csv.string() << "\n";
        return 0;
    }
    catch (const ConvergenceError &e)
    {
        std::cerr << "convergence failure: " << e.what() << " (estimate " << e.estimate() << ", last term "
                  << e.last_term() << ")\n";
        return 2;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    catch (const DomainError &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    catch (const ArgumentError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
