// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo sweeps: symbol-level BER over position or SNR, sample-level
// secrecy rate / outage over FTR draws, and the memory footprint tables.
//
// Every (grid point, method) task owns an RNG seeded from (seed, point index,
// method index), so results do not depend on the number of worker threads.

#ifndef FDADM_MONTECARLO_HPP
#define FDADM_MONTECARLO_HPP

#include "fdadm/analytics.hpp"
#include "fdadm/array_geometry.hpp"
#include "fdadm/ftr_channel.hpp"
#include "fdadm/precoder.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fdadm
{
    enum class Scheme
    {
        PSK,
        QAM
    };

    struct Modulation
    {
        Scheme scheme = Scheme::PSK;
        int order = 4;

        int bits() const;
        void validate() const; // PSK: power of two >= 2; QAM: 4, 16, 64, 256
    };

    std::string_view to_string(Scheme s);
    Scheme scheme_from_string(std::string_view s);

    // Gray-mapped, unit average energy. `label` is the bit pattern carried by the symbol.
    std::complex<double> modulate(int label, const Modulation &mod);
    // Minimum-distance decision, returns the label.
    int demodulate(std::complex<double> y, const Modulation &mod);

    enum class Metric
    {
        BerVsRange,
        BerVsAzimuth,
        BerVsElevation,
        BerVsSnr,
        SrVsLambdaB,
        SrVsLambdaE,
        SopVsLambdaB,
        SopVsLambdaE,
        MemoryVsN,
        MemoryVsL
    };

    std::string_view to_string(Metric m);
    Metric metric_from_string(std::string_view s);
    // Name and unit of the swept variable.
    std::string_view sweep_variable(Metric m);
    std::string_view sweep_unit(Metric m);

    // Everything held fixed while one variable is swept. Defaults follow the reference
    // scenario (30 GHz, 20 kHz, N = 10, L = 7, beta1 = 0.9).
    struct Scenario
    {
        ArrayConfig array;
        Position bob{1000.0, deg_to_rad(20.0), deg_to_rad(30.0)};
        Position eve{1500.0, deg_to_rad(-20.0), deg_to_rad(25.0)};
        FtrParams ftr_bob{2.3, 10.0, 0.5, 0.5}; // sigma2 is derived from the average SNR
        FtrParams ftr_eve{5.3, 15.0, 0.35, 0.5};
        double ps = 1.0;
        double beta1 = 0.9;
        double noise_var_b = 1.0;
        double noise_var_e = 1.0;
        double snr_db = 10.0;      // Ps / noise variance for BER sweeps
        double lambda_b_db = 15.0; // Bob's average SNR when sweeping Eve's
        double lambda_e_db = 10.0; // Eve's average SNR when sweeping Bob's
        double r0 = 0.0;           // SOP target rate [bits/s/Hz]
        bool ber_fading = false;   // condition BER on FTR draws (coherent receiver)
    };

    struct SweepSpec
    {
        Metric metric = Metric::BerVsSnr;
        std::vector<double> grid;
        std::vector<Method> methods{Method::SP, Method::ZF, Method::SVD};
        std::int64_t trials = 100000;
        std::uint64_t seed = 1;
        Modulation modulation;
        Scenario fixed;
        bool analytic = true; // attach analytic and bound values where defined
        SeriesOptions series;
        QuadratureOptions quadrature;
        unsigned threads = 0; // 0 selects std::thread::hardware_concurrency()

        void validate() const; // throws ArgumentError
    };

    struct SweepPoint
    {
        double x = 0.0;
        Method method = Method::SP;
        std::string receiver; // "bob", "eve", "probe" or "" (memory)
        std::string quantity; // "ber", "sr", "sop", "memory_total", "ratio_sp_zf", "ratio_sp_svd"
        std::optional<double> mc_value; // empty for exact quantities (memory)
        double mc_stderr = 0.0;
        std::optional<double> analytic_value;
        std::optional<double> bound_value;
    };

    struct SweepResult
    {
        Metric metric = Metric::BerVsSnr;
        std::vector<SweepPoint> points;
    };

    SweepResult run_ber_sweep(const SweepSpec &spec);
    SweepResult run_secrecy_sweep(const SweepSpec &spec);
    SweepResult run_memory_sweep(const SweepSpec &spec);
    // Dispatches on spec.metric.
    SweepResult run_sweep(const SweepSpec &spec);

    // Per-task generator seeded from (seed, point, method).
    std::mt19937_64 task_rng(std::uint64_t seed, std::size_t point, std::size_t method);
}

#endif
