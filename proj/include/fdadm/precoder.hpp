// SPDX-License-Identifier: Apache-2.0
//
// Useful-signal and artificial-noise (AN) precoders for FDA directional modulation.
//
// All methods use p1 = h_B. The AN basis differs:
//   SP   single column p2 orthogonal to h_B, scalar AN z
//   ZF   projector I - h_B h_B^H, AN vector of width (2N+1)L
//   SVD  2N orthonormal null-space columns of h_B^H, AN vector of width 2N
//   NoAN no AN (beta1 = 1 baseline)

#ifndef FDADM_PRECODER_HPP
#define FDADM_PRECODER_HPP

#include "fdadm/array_geometry.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fdadm
{
    enum class Method
    {
        SP,
        ZF,
        SVD,
        NoAN
    };

    std::string_view to_string(Method m);
    Method method_from_string(std::string_view s); // throws ArgumentError

    // beta1^2 + beta2^2 = 1
    class PowerSplit
    {
    public:
        explicit PowerSplit(double beta1);
        PowerSplit(double beta1, double beta2);

        static PowerSplit no_an() { return PowerSplit(1.0); }

        double beta1() const { return beta1_; }
        double beta2() const { return beta2_; }

    private:
        double beta1_;
        double beta2_;
    };

    class PrecoderSet
    {
    public:
        PrecoderSet(Method method, Eigen::VectorXcd p1, Eigen::MatrixXcd an_basis, double alpha, int an_rank);

        Method method() const { return method_; }
        const Eigen::VectorXcd &p1() const { return p1_; }
        const Eigen::MatrixXcd &an_basis() const { return an_basis_; }
        // AN normalization 1/||p2|| (SP). Equal to 1 for the other methods, which normalize per draw.
        double alpha() const { return alpha_; }
        // Number of AN inputs the transmitter draws: 1 (SP), (2N+1)L (ZF), 2N (SVD), 0 (NoAN).
        Eigen::Index an_width() const { return an_basis_.cols(); }
        // Dimension of the AN subspace: 1 (SP), (2N+1)L - 1 (ZF), 2N (SVD), 0 (NoAN).
        int an_rank() const { return an_rank_; }
        Eigen::Index dimension() const { return p1_.size(); }

        // ||an_basis * z||^2, exploiting the basis structure of each method.
        double an_norm_squared(std::span<const std::complex<double>> z) const;

    private:
        Method method_;
        Eigen::VectorXcd p1_;
        Eigen::MatrixXcd an_basis_;
        double alpha_;
        int an_rank_;
    };

    Eigen::VectorXcd design_p1(const SteeringVector &h_b);

    // Canonical SP: Gram-Schmidt of the first standard basis vector not parallel to h_B,
    // normalized, so alpha = 1.
    PrecoderSet design_sp(const SteeringVector &h_b);
    // Randomized SP: projection of a seeded complex Gaussian vector onto the complement of h_B.
    PrecoderSet design_sp(const SteeringVector &h_b, std::uint64_t seed);

    PrecoderSet design_zf(const SteeringVector &h_b);

    // First 2N null-space columns from Gram-Schmidt over e_1, e_2, ... against h_B.
    PrecoderSet design_svd(const SteeringVector &h_b, int n_half);

    PrecoderSet design_no_an(const SteeringVector &h_b);

    PrecoderSet design_precoder(Method method, const SteeringVector &h_b, int n_half);

    struct MemoryFootprint
    {
        std::uint64_t orthogonal_size = 0;
        std::uint64_t an_size = 0;
        std::uint64_t total = 0;
    };

    // Complex scalars stored for the orthogonal matrix/vector and the AN.
    MemoryFootprint memory_footprint(Method method, int n_half, int subcarriers);
}

#endif
