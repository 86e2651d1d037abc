// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration, output records and the validation suites behind the
// command-line runner.
//
// Config files are flat "section.key = value" text. Angles are in degrees and SNRs
// in dB; both are converted once when a SweepSpec is built.

#ifndef FDADM_CLI_HPP
#define FDADM_CLI_HPP

#include "fdadm/error.hpp"
#include "fdadm/montecarlo.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdadm
{
    struct PositionDeg
    {
        double range = 1000.0;
        double azimuth_deg = 0.0;
        double elevation_deg = 0.0;

        Position to_position() const;
    };

    struct ExperimentConfig
    {
        ArrayConfig array;
        PositionDeg bob{1000.0, 20.0, 30.0};
        PositionDeg eve{1500.0, -20.0, 25.0};
        FtrParams ftr_bob{2.3, 10.0, 0.5, 0.5}; // sigma2 is not a config key
        FtrParams ftr_eve{5.3, 15.0, 0.35, 0.5};
        double ps = 1.0;
        double beta1 = 0.9;
        double noise_var_b = 1.0;
        double noise_var_e = 1.0;
        double snr_db = 10.0;
        double lambda_b_db = 15.0;
        double lambda_e_db = 10.0;
        double r0 = 0.0;
        bool ber_fading = false;
        SeriesOptions series;
        QuadratureOptions quadrature;
        std::int64_t trials = 100000;
        std::uint64_t seed = 1;
        unsigned threads = 0;
        Modulation modulation;

        Scenario scenario() const;
        void validate() const; // throws ConfigError
    };

    // Malformed or invalid configuration; the message names the offending key.
    class ConfigError : public ArgumentError
    {
    public:
        using ArgumentError::ArgumentError;
    };

    // Canonical text: every key, fixed order, shortest round-trip numbers.
    std::string dump_config(const ExperimentConfig &cfg);
    // Starts from the defaults and applies each "key = value" line ('#' starts a comment).
    ExperimentConfig parse_config(std::string_view text);
    ExperimentConfig load_config(const std::filesystem::path &path);
    void set_config_value(ExperimentConfig &cfg, std::string_view key, std::string_view value);
    std::vector<std::string> config_keys();

    // FNV-1a of the canonical text, 16 hex digits.
    std::string config_hash(const ExperimentConfig &cfg);

    SweepSpec make_sweep_spec(const ExperimentConfig &cfg, Metric metric, std::vector<double> grid,
                              std::vector<Method> methods);

    struct OutputRecord
    {
        std::string experiment_id;
        std::string method;
        std::string sweep_variable;
        std::string sweep_unit;
        double sweep_value = 0.0;
        std::string metric;
        std::string quantity;
        std::string receiver;
        std::string estimator; // mc, analytic, lower_bound, upper_bound
        double value = 0.0;
        std::optional<double> stderr_value; // mc rows only
        std::uint64_t seed = 0;
        std::string config_hash;

        bool operator==(const OutputRecord &) const = default;
    };

    std::vector<OutputRecord> to_records(const SweepResult &result, const std::string &experiment_id,
                                         std::uint64_t seed, const std::string &hash);
    // Stable sort by (sweep value, method, estimator).
    void sort_records(std::vector<OutputRecord> &records);

    std::string format_csv(const std::vector<OutputRecord> &records);
    std::vector<OutputRecord> parse_csv(std::string_view text);
    void emit_csv(const std::vector<OutputRecord> &records, const std::filesystem::path &path);
    void emit_json(const std::vector<OutputRecord> &records, const std::filesystem::path &path);

    struct SuiteResult
    {
        std::string suite;
        bool passed = false;
        std::vector<std::string> failures;
        std::string summary;
    };

    // Orthogonality, FTR KS, Psi identity, secrecy rate vs MC, SOP vs MC, bound ordering.
    std::vector<SuiteResult> run_validation(const ExperimentConfig &cfg);
}

#endif
