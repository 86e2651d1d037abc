// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "fdadm/cli.hpp"

#include <filesystem>
#include <fstream>

using namespace fdadm;

TEST_CASE("default config carries the reference scenario")
{
    const std::string text = dump_config(ExperimentConfig{});
    for (const char *line : {"array.f0 = 3e+10", "array.delta_f = 20000", "array.n_half = 10", "array.subcarriers = 7",
                             "power.beta1 = 0.9", "ftr_bob.m = 2.3", "ftr_bob.K = 10", "ftr_bob.delta = 0.5",
                             "ftr_eve.m = 5.3", "ftr_eve.K = 15", "ftr_eve.delta = 0.35", "bob.range = 1000",
                             "bob.azimuth_deg = 20", "bob.elevation_deg = 30", "eve.range = 1500",
                             "eve.azimuth_deg = -20", "eve.elevation_deg = 25", "run.trials = 100000"})
        CHECK(text.find(std::string(line) + "\n") != std::string::npos);
}

TEST_CASE("config round trip and overrides")
{
    ExperimentConfig cfg;
    set_config_value(cfg, "power.beta1", "0.7");
    set_config_value(cfg, "bob.azimuth_deg", "0.1");
    set_config_value(cfg, "modulation.scheme", "QAM");
    set_config_value(cfg, "modulation.order", "16");
    set_config_value(cfg, "link.ber_fading", "true");
    const std::string once = dump_config(cfg);
    CHECK(dump_config(parse_config(once)) == once);
    CHECK(config_hash(parse_config(once)) == config_hash(cfg));
    CHECK(config_hash(cfg) != config_hash(ExperimentConfig{}));
    CHECK(config_hash(cfg).size() == 16);

    const ExperimentConfig c = parse_config("# comment\n\n  power.ps = 2   # trailing\nrun.seed=99\n");
    CHECK(c.ps == 2.0);
    CHECK(c.seed == 99);

    const auto path = std::filesystem::temp_directory_path() / "fdadm_cfg_test.cfg";
    std::ofstream(path) << once;
    CHECK(dump_config(load_config(path)) == once);
    std::filesystem::remove(path);
}

TEST_CASE("config errors name the key")
{
    auto message = [](const std::string &text)
    {
        try
        {
            parse_config(text);
        }
        catch (const ConfigError &e)
        {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("ftr_bob.m = x\n").find("ftr_bob.m") != std::string::npos);
    CHECK(message("array.bogus = 1\n").find("array.bogus") != std::string::npos);
    CHECK(message("run.trials = 1.5\n").find("run.trials") != std::string::npos);
    CHECK(message("power.beta1 = 2\n").find("power") != std::string::npos);
    CHECK(message("ftr_eve.delta = 3\n").find("ftr_eve") != std::string::npos);
    CHECK(message("no equals sign\n").find("line 1") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/fdadm.cfg"), ConfigError);
}

TEST_CASE("records, ordering and CSV round trip")
{
    SweepResult r;
    r.metric = Metric::SopVsLambdaB;
    SweepPoint a;
    a.x = 10.0;
    a.method = Method::ZF;
    a.receiver = "bob";
    a.quantity = "sop";
    a.mc_value = 0.1 + 1e-17;
    a.mc_stderr = 1.0 / 3.0;
    a.analytic_value = 0.123456789012345678;
    a.bound_value = 0.2;
    SweepPoint b = a;
    b.x = 5.0;
    b.method = Method::SP;
    r.points = {a, b};

    auto rec = to_records(r, "sop-x", 7, "abc");
    REQUIRE(rec.size() == 6);
    CHECK(rec[2].estimator == "upper_bound");
    sort_records(rec);
    CHECK(rec[0].sweep_value == 5.0);
    CHECK(rec[0].estimator == "mc");
    CHECK(rec[1].estimator == "analytic");
    CHECK(rec[3].method == "ZF");
    CHECK(!rec[1].stderr_value);
    CHECK(rec[0].sweep_variable == "lambda_b");
    CHECK(rec[0].sweep_unit == "dB");

    const std::string csv = format_csv(rec);
    CHECK(parse_csv(csv) == rec);
    CHECK(format_csv(parse_csv(csv)) == csv);

    // Ordering does not depend on the input order.
    auto shuffled = rec;
    std::reverse(shuffled.begin(), shuffled.end());
    sort_records(shuffled);
    CHECK(shuffled == rec);

    const auto path = std::filesystem::temp_directory_path() / "fdadm_records.csv";
    emit_csv({rec[0]}, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(parse_csv(ss.str()) == std::vector<OutputRecord>{rec[0]});
    std::filesystem::remove(path);
    CHECK_THROWS_AS(emit_csv(rec, "/nonexistent-dir/x.csv"), ArgumentError);
    CHECK_THROWS_AS(emit_csv({}, path), ArgumentError);
}

TEST_CASE("sweep spec from config converts units")
{
    ExperimentConfig cfg;
    cfg.trials = 123;
    cfg.bob.azimuth_deg = 90.0;
    const SweepSpec s = make_sweep_spec(cfg, Metric::BerVsSnr, {0.0, 1.0}, {Method::SP});
    CHECK(s.trials == 123);
    CHECK(s.fixed.bob.theta == doctest::Approx(M_PI / 2));
    CHECK_THROWS_AS(make_sweep_spec(cfg, Metric::BerVsSnr, {1.0, 0.5, 2.0}, {Method::SP}), ArgumentError);
}
