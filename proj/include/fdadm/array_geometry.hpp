// SPDX-License-Identifier: Apache-2.0
//
// Symmetrical multi-carrier frequency diverse array (FDA) in three dimensions.
// Elements are indexed n = -N..N along the x-axis, each radiating L subcarriers
// with frequency f0 + df * ln(|n|+1) * ln(l+1).

#ifndef FDADM_ARRAY_GEOMETRY_HPP
#define FDADM_ARRAY_GEOMETRY_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fdadm
{
    inline constexpr double speed_of_light = 299792458.0;

    struct ArrayConfig
    {
        int n_half = 10;           // N, total 2N+1 elements
        int subcarriers = 7;       // L
        double f0 = 30e9;          // central frequency [Hz]
        double delta_f = 20e3;     // fixed frequency increment [Hz]
        double spacing = 0.0;      // element spacing d [m]; 0 selects c / (2 f0)
        double c = speed_of_light; // propagation speed [m/s]

        int dimension() const { return (2 * n_half + 1) * subcarriers; }
        double element_spacing() const { return spacing > 0.0 ? spacing : c / (2.0 * f0); }

        // max |df_{n,l}| / f0, the quantity bounded by the narrowband constraint
        double max_offset_ratio() const;

        // Throws ArgumentError on hard violations (including offset ratio above 1e-3).
        // Returns soft warnings (offset ratio above 1e-4); they are also sent to fdadm::warn.
        std::vector<std::string> validate() const;
    };

    // Receiver location. Angles in radians.
    struct Position
    {
        double r = 1000.0;  // range [m]
        double theta = 0.0; // azimuth, [-pi/2, pi/2]
        double psi = 0.0;   // elevation, [-pi/2, pi/2]

        void validate() const;
    };

    double deg_to_rad(double deg);
    double rad_to_deg(double rad);

    // Unit-norm steering vector, entries ordered element-major:
    // index (n + N) * L + l for n = -N..N, l = 0..L-1.
    class SteeringVector
    {
    public:
        SteeringVector() = default;
        explicit SteeringVector(Eigen::VectorXcd entries) : entries_(std::move(entries)) {}

        const Eigen::VectorXcd &entries() const { return entries_; }
        Eigen::Index size() const { return entries_.size(); }
        std::complex<double> operator[](Eigen::Index i) const { return entries_[i]; }

        // h^H v
        std::complex<double> inner(const Eigen::VectorXcd &v) const { return entries_.dot(v); }

    private:
        Eigen::VectorXcd entries_;
    };

    // df_{n,l} = df * ln(|n|+1) * ln(l+1)
    double frequency_offset(const ArrayConfig &cfg, int n, int l);

    // f_{n,l} = f0 + df_{n,l}
    double subcarrier_frequency(const ArrayConfig &cfg, int n, int l);

    SteeringVector steering_vector(const ArrayConfig &cfg, const Position &pos, double t = 0.0);
}

#endif
