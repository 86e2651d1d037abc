// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "fdadm/error.hpp"
#include "fdadm/precoder.hpp"

#include <random>

using namespace fdadm;

namespace
{
    SteeringVector unit(Eigen::VectorXcd v) { return SteeringVector(v / v.norm()); }

    SteeringVector random_bob(std::mt19937_64 &rng)
    {
        std::uniform_real_distribution<double> r(100.0, 5000.0), a(-1.5, 1.5);
        return steering_vector(ArrayConfig{}, {r(rng), a(rng), a(rng)});
    }
}

TEST_CASE("p1 is the normalized Bob channel")
{
    const SteeringVector h = unit(Eigen::VectorXcd::Ones(3));
    const Eigen::VectorXcd p1 = design_p1(h);
    CHECK((p1 - h.entries()).norm() < 1e-15);
    CHECK(std::abs(h.inner(p1) - 1.0) < 1e-12);
    CHECK(p1.norm() == doctest::Approx(1.0));
}

TEST_CASE("single-point AN vector")
{
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(3);
    e1[0] = 1.0;
    const PrecoderSet sp = design_sp(SteeringVector(e1));
    CHECK(std::abs(sp.an_basis()(0, 0)) < 1e-15);
    CHECK(sp.an_basis().col(0).norm() == doctest::Approx(1.0));

    Eigen::VectorXcd two(2);
    two << 1.0, 1.0;
    const PrecoderSet sp2 = design_sp(unit(two));
    const Eigen::VectorXcd p2 = sp2.an_basis().col(0);
    CHECK(std::abs(p2[0] + p2[1]) < 1e-12);
    CHECK(std::abs(std::abs(p2[0]) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(sp2.alpha() * sp2.alpha() * p2.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));

    Eigen::VectorXcd one(1);
    one << 1.0;
    CHECK_THROWS_AS(design_sp(SteeringVector(one)), DomainError);
}

TEST_CASE("seeded single-point AN vector keeps alpha^2 ||p2||^2 = 1")
{
    std::mt19937_64 rng(5);
    const SteeringVector h = random_bob(rng);
    const PrecoderSet a = design_sp(h, 42), b = design_sp(h, 42);
    CHECK((a.an_basis() - b.an_basis()).norm() == 0.0);
    CHECK(std::abs(h.inner(a.an_basis().col(0))) < 1e-10);
    CHECK(a.alpha() * a.alpha() * a.an_basis().col(0).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("zero-forcing projector")
{
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(2);
    e1[0] = 1.0;
    const PrecoderSet zf = design_zf(SteeringVector(e1));
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
    expected(1, 1) = 1.0;
    CHECK((zf.an_basis() - expected).norm() < 1e-15);

    std::mt19937_64 rng(6);
    const SteeringVector h = random_bob(rng);
    const PrecoderSet p = design_zf(h);
    CHECK((p.an_basis() * h.entries()).norm() < 1e-10);
    CHECK(std::abs(p.an_basis().trace() - 146.0) < 1e-10);
    CHECK(p.an_rank() == 146);
}

TEST_CASE("SVD null-space basis")
{
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(3);
    e1[0] = 1.0;
    const PrecoderSet svd = design_svd(SteeringVector(e1), 1);
    REQUIRE(svd.an_basis().cols() == 2);
    CHECK(svd.an_basis().row(0).norm() < 1e-15);

    std::mt19937_64 rng(7);
    const SteeringVector h = random_bob(rng);
    const PrecoderSet p = design_svd(h, 10);
    CHECK((p.an_basis().adjoint() * p.an_basis() - Eigen::MatrixXcd::Identity(20, 20)).norm() < 1e-10);
    CHECK((h.entries().adjoint() * p.an_basis()).norm() < 1e-10);

    // (2N+1)L - 1 < 2N cannot happen for L >= 1, so force it with a short channel.
    Eigen::VectorXcd short_h = Eigen::VectorXcd::Ones(3);
    CHECK_THROWS_AS(design_svd(unit(short_h), 2), DomainError);
}

TEST_CASE("AN norm shortcut matches the explicit product")
{
    std::mt19937_64 rng(8);
    const SteeringVector h = random_bob(rng);
    std::normal_distribution<double> n;
    for (Method m : {Method::SP, Method::ZF, Method::SVD})
    {
        const PrecoderSet pre = design_precoder(m, h, 10);
        Eigen::VectorXcd z(pre.an_width());
        for (auto &v : z)
            v = {n(rng), n(rng)};
        CHECK(pre.an_norm_squared({z.data(), static_cast<std::size_t>(z.size())}) ==
              doctest::Approx((pre.an_basis() * z).squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("memory footprint")
{
    CHECK(memory_footprint(Method::SP, 10, 7).total == 148);
    CHECK(memory_footprint(Method::ZF, 10, 7).total == 21756);
    CHECK(memory_footprint(Method::SVD, 10, 7).total == 2960);
    CHECK(memory_footprint(Method::SP, 1, 1).total == 4);
    CHECK(memory_footprint(Method::ZF, 1, 1).total == 12);
    CHECK(memory_footprint(Method::SVD, 1, 1).total == 8);
    CHECK(memory_footprint(Method::NoAN, 10, 7).total == 0);
    CHECK_THROWS_AS(memory_footprint(Method::SP, 0, 7), ArgumentError);
}

TEST_CASE("method names and power split")
{
    for (Method m : {Method::SP, Method::ZF, Method::SVD, Method::NoAN})
        CHECK(method_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(method_from_string("MMSE"), ArgumentError);
    CHECK(PowerSplit(0.6).beta2() == doctest::Approx(0.8));
    CHECK_THROWS_AS(PowerSplit(0.6, 0.6), ArgumentError);
    CHECK_THROWS_AS(PowerSplit(1.2), ArgumentError);
}
