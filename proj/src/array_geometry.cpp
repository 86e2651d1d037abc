// SPDX-License-Identifier: Apache-2.0

#include "fdadm/array_geometry.hpp"
#include "fdadm/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fdadm
{
    double ArrayConfig::max_offset_ratio() const
    {
        return std::abs(delta_f) * std::log(n_half + 1.0) * std::log(static_cast<double>(subcarriers)) / f0;
    }

    std::vector<std::string> ArrayConfig::validate() const
    {
        if (n_half < 1)
            throw ArgumentError("array: n_half must be >= 1");
        if (subcarriers < 1)
            throw ArgumentError("array: subcarriers must be >= 1");
        if (!(f0 > 0.0))
            throw ArgumentError("array: f0 must be positive");
        if (!(delta_f >= 0.0))
            throw ArgumentError("array: delta_f must be non-negative");
        if (spacing < 0.0)
            throw ArgumentError("array: spacing must be positive (or 0 for half wavelength)");
        if (!(c > 0.0))
            throw ArgumentError("array: propagation speed must be positive");

        std::vector<std::string> warnings;
        const double ratio = max_offset_ratio();
        if (ratio > 1e-3)
        {
            std::ostringstream os;
            os << "array: max frequency offset ratio " << ratio << " exceeds 1e-3 of f0";
            throw ArgumentError(os.str());
        }
        if (ratio > 1e-4)
        {
            std::ostringstream os;
            os << "array: max frequency offset ratio " << ratio
               << " exceeds 1e-4 of f0; far-field phase approximation degrades";
            warnings.push_back(os.str());
            warn(warnings.back());
        }
        return warnings;
    }

    void Position::validate() const
    {
        constexpr double half_pi = std::numbers::pi / 2.0;
        if (!(r > 0.0))
            throw ArgumentError("position: range must be positive");
        if (!(theta >= -half_pi && theta <= half_pi))
            throw ArgumentError("position: azimuth must lie in [-pi/2, pi/2]");
        if (!(psi >= -half_pi && psi <= half_pi))
            throw ArgumentError("position: elevation must lie in [-pi/2, pi/2]");
    }

    double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
    double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

    double frequency_offset(const ArrayConfig &cfg, int n, int l)
    {
        if (n < -cfg.n_half || n > cfg.n_half)
            throw ArgumentError("element index out of range");
        if (l < 0 || l >= cfg.subcarriers)
            throw ArgumentError("subcarrier index out of range");
        return cfg.delta_f * std::log(std::abs(n) + 1.0) * std::log(l + 1.0);
    }

    double subcarrier_frequency(const ArrayConfig &cfg, int n, int l)
    {
        return cfg.f0 + frequency_offset(cfg, n, l);
    }

    SteeringVector steering_vector(const ArrayConfig &cfg, const Position &pos, double t)
    {
        cfg.validate();
        pos.validate();

        const int L = cfg.subcarriers;
        const double norm = 1.0 / std::sqrt(static_cast<double>(cfg.dimension()));
        const double two_pi = 2.0 * std::numbers::pi;
        const double delay = t - pos.r / cfg.c;
        const double spatial = cfg.f0 * cfg.element_spacing() * std::sin(pos.theta) * std::cos(pos.psi) / cfg.c;

        Eigen::VectorXcd h(cfg.dimension());
        for (int n = -cfg.n_half; n <= cfg.n_half; ++n)
        {
            for (int l = 0; l < L; ++l)
            {
                // Reduce each phase term modulo one cycle before scaling by 2 pi.
                double cycles = frequency_offset(cfg, n, l) * delay;
                cycles -= std::floor(cycles);
                double space_cycles = n * spatial;
                space_cycles -= std::floor(space_cycles);
                h[(n + cfg.n_half) * L + l] = std::polar(norm, two_pi * (cycles + space_cycles));
            }
        }
        return SteeringVector(std::move(h));
    }
}
