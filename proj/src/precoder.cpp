// SPDX-License-Identifier: Apache-2.0

#include "fdadm/precoder.hpp"
#include "fdadm/error.hpp"

#include <cmath>
#include <random>

namespace fdadm
{
    std::string_view to_string(Method m)
    {
        switch (m)
        {
        case Method::SP:
            return "SP";
        case Method::ZF:
            return "ZF";
        case Method::SVD:
            return "SVD";
        case Method::NoAN:
            return "NoAN";
        }
        return "?";
    }

    Method method_from_string(std::string_view s)
    {
        if (s == "SP" || s == "sp")
            return Method::SP;
        if (s == "ZF" || s == "zf")
            return Method::ZF;
        if (s == "SVD" || s == "svd")
            return Method::SVD;
        if (s == "NoAN" || s == "noan" || s == "NOAN")
            return Method::NoAN;
        throw ArgumentError("unknown precoding method '" + std::string(s) + "'");
    }

    PowerSplit::PowerSplit(double beta1)
        : PowerSplit(beta1, std::sqrt(std::max(0.0, 1.0 - beta1 * beta1))) {}

    PowerSplit::PowerSplit(double beta1, double beta2) : beta1_(beta1), beta2_(beta2)
    {
        if (!(beta1 >= 0.0 && beta1 <= 1.0) || !(beta2 >= 0.0 && beta2 <= 1.0))
            throw ArgumentError("power split factors must lie in [0, 1]");
        if (std::abs(beta1 * beta1 + beta2 * beta2 - 1.0) > 1e-12)
            throw ArgumentError("power split factors must satisfy beta1^2 + beta2^2 = 1");
    }

    PrecoderSet::PrecoderSet(Method method, Eigen::VectorXcd p1, Eigen::MatrixXcd an_basis, double alpha, int an_rank)
        : method_(method), p1_(std::move(p1)), an_basis_(std::move(an_basis)), alpha_(alpha), an_rank_(an_rank)
    {
        if (an_basis_.cols() > 0 && an_basis_.rows() != p1_.size())
            throw ArgumentError("AN basis row count must match the array dimension");
    }

    double PrecoderSet::an_norm_squared(std::span<const std::complex<double>> z) const
    {
        if (static_cast<Eigen::Index>(z.size()) != an_width())
            throw ArgumentError("AN draw width does not match the precoding method");
        Eigen::Map<const Eigen::VectorXcd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
        switch (method_)
        {
        case Method::NoAN:
            return 0.0;
        case Method::SP:
            return an_basis_.col(0).squaredNorm() * std::norm(z[0]);
        case Method::SVD:
            return zv.squaredNorm(); // orthonormal columns
        case Method::ZF:
            // (I - h h^H) z has norm^2 ||z||^2 - |h^H z|^2
            return std::max(0.0, zv.squaredNorm() - std::norm(p1_.dot(zv)));
        }
        return (an_basis_ * zv).squaredNorm();
    }

    namespace
    {
        // Removes the components along h and the given columns; two passes keep the
        // residual at machine precision.
        Eigen::VectorXcd orthogonalize(Eigen::VectorXcd v, const Eigen::VectorXcd &h,
                                       const Eigen::MatrixXcd &basis, Eigen::Index used)
        {
            for (int pass = 0; pass < 2; ++pass)
            {
                v -= h * h.dot(v);
                for (Eigen::Index c = 0; c < used; ++c)
                    v -= basis.col(c) * basis.col(c).dot(v);
            }
            return v;
        }

        void require_unit_norm(const SteeringVector &h_b)
        {
            if (h_b.size() == 0 || std::abs(h_b.entries().norm() - 1.0) > 1e-9)
                throw ArgumentError("steering vector must have unit norm");
        }
    }

    Eigen::VectorXcd design_p1(const SteeringVector &h_b)
    {
        require_unit_norm(h_b);
        return h_b.entries();
    }

    PrecoderSet design_sp(const SteeringVector &h_b)
    {
        require_unit_norm(h_b);
        const Eigen::Index dim = h_b.size();
        if (dim < 2)
            throw DomainError("SP precoder: dimension 1 has no orthogonal complement");

        const Eigen::VectorXcd &h = h_b.entries();
        const Eigen::MatrixXcd none;
        for (Eigen::Index k = 0; k < dim; ++k)
        {
            Eigen::VectorXcd e = Eigen::VectorXcd::Unit(dim, k);
            Eigen::VectorXcd v = orthogonalize(e, h, none, 0);
            const double norm = v.norm();
            if (norm > 1e-6)
            {
                Eigen::MatrixXcd p2 = v / norm;
                return PrecoderSet(Method::SP, h, std::move(p2), 1.0, 1);
            }
        }
        throw NumericalError("SP precoder: no standard basis vector yields an orthogonal direction");
    }

    PrecoderSet design_sp(const SteeringVector &h_b, std::uint64_t seed)
    {
        require_unit_norm(h_b);
        const Eigen::Index dim = h_b.size();
        if (dim < 2)
            throw DomainError("SP precoder: dimension 1 has no orthogonal complement");

        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        const Eigen::MatrixXcd none;
        for (;;)
        {
            Eigen::VectorXcd v(dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                v[i] = {normal(rng), normal(rng)};
            v = orthogonalize(v, h_b.entries(), none, 0);
            const double norm = v.norm();
            if (norm > 1e-6)
            {
                // Unnormalized p2 on purpose: alpha carries the normalization.
                Eigen::MatrixXcd p2 = v;
                return PrecoderSet(Method::SP, h_b.entries(), std::move(p2), 1.0 / norm, 1);
            }
        }
    }

    PrecoderSet design_zf(const SteeringVector &h_b)
    {
        require_unit_norm(h_b);
        const Eigen::VectorXcd &h = h_b.entries();
        const Eigen::Index dim = h.size();
        Eigen::MatrixXcd p2 = Eigen::MatrixXcd::Identity(dim, dim) - h * h.adjoint();
        return PrecoderSet(Method::ZF, h, std::move(p2), 1.0, static_cast<int>(dim - 1));
    }

    PrecoderSet design_svd(const SteeringVector &h_b, int n_half)
    {
        require_unit_norm(h_b);
        if (n_half < 1)
            throw ArgumentError("SVD precoder: n_half must be >= 1");
        const Eigen::VectorXcd &h = h_b.entries();
        const Eigen::Index dim = h.size();
        const Eigen::Index width = 2 * n_half;
        if (dim - 1 < width)
            throw DomainError("SVD precoder: null space of h_B^H has fewer than 2N dimensions");

        Eigen::MatrixXcd basis(dim, width);
        Eigen::Index used = 0;
        for (Eigen::Index k = 0; k < dim && used < width; ++k)
        {
            Eigen::VectorXcd v = orthogonalize(Eigen::VectorXcd::Unit(dim, k), h, basis, used);
            const double norm = v.norm();
            if (norm > 1e-6)
                basis.col(used++) = v / norm;
        }
        if (used < width)
            throw NumericalError("SVD precoder: Gram-Schmidt produced fewer than 2N columns");
        return PrecoderSet(Method::SVD, h, std::move(basis), 1.0, static_cast<int>(width));
    }

    PrecoderSet design_no_an(const SteeringVector &h_b)
    {
        require_unit_norm(h_b);
        return PrecoderSet(Method::NoAN, h_b.entries(), Eigen::MatrixXcd(h_b.size(), 0), 1.0, 0);
    }

    PrecoderSet design_precoder(Method method, const SteeringVector &h_b, int n_half)
    {
        switch (method)
        {
        case Method::SP:
            return design_sp(h_b);
        case Method::ZF:
            return design_zf(h_b);
        case Method::SVD:
            return design_svd(h_b, n_half);
        case Method::NoAN:
            return design_no_an(h_b);
        }
        throw ArgumentError("unknown precoding method");
    }

    MemoryFootprint memory_footprint(Method method, int n_half, int subcarriers)
    {
        if (n_half < 1 || subcarriers < 1)
            throw ArgumentError("memory footprint: N and L must be >= 1");
        const std::uint64_t N = static_cast<std::uint64_t>(n_half);
        const std::uint64_t dim = (2 * N + 1) * static_cast<std::uint64_t>(subcarriers);

        MemoryFootprint f;
        switch (method)
        {
        case Method::ZF:
            f.orthogonal_size = dim * dim;
            f.an_size = dim;
            break;
        case Method::SVD:
            f.orthogonal_size = dim * 2 * N;
            f.an_size = 2 * N;
            break;
        case Method::SP:
            f.orthogonal_size = dim;
            f.an_size = 1;
            break;
        case Method::NoAN:
            break;
        }
        f.total = f.orthogonal_size + f.an_size;
        return f;
    }
}
