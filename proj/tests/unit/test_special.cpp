// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "fdadm/special.hpp"

#include <cmath>

using namespace fdadm::special;

// Reference values from mpmath (legenp type 3/2, hyp2f1, expint) at 25 digits.
TEST_CASE("Hobson Legendre function of negative integer order")
{
    CHECK(std::exp(log_legendre_p_neg(2.3, 2, 1.7)) == doctest::Approx(0.2734709528264171714).epsilon(1e-12));
    CHECK(std::exp(log_legendre_p_neg(11.3, 4, 3.2)) == doctest::Approx(4371.401441617789832).epsilon(1e-12));
    CHECK(legendre_p_hobson(2.3, -2, 1.7) == doctest::Approx(0.2734709528264171714).epsilon(1e-12));
    CHECK(legendre_p_hobson(2.3, 2, 1.7) == doctest::Approx(11.60285293361450871).epsilon(1e-12));
    CHECK(legendre_p_hobson(0.7, 0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("type-2 Legendre phase")
{
    const auto p2 = legendre_p_type2(2.3, 2, 1.7);
    CHECK(p2.real() == doctest::Approx(-11.60285293361450871).epsilon(1e-12));
    CHECK(std::abs(p2.imag()) < 1e-12);
    const auto p1 = legendre_p_type2(2.3, 1, 1.7);
    CHECK(std::abs(p1.real()) < 1e-12);
    CHECK(p1.imag() == doctest::Approx(-10.7440663431900653527).epsilon(1e-12));
}

TEST_CASE("positive hypergeometric series")
{
    CHECK(std::exp(log_hyp2f1_positive(-2.3, -0.3, 3.0, 0.4)) == doctest::Approx(1.087872867602561992).epsilon(1e-13));
    CHECK(log_hyp2f1_positive(1.0, 1.0, 1.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("scaled exponential integral")
{
    CHECK(scaled_expint(3, 5.0) == doctest::Approx(0.1302772035591525226).epsilon(1e-13));
    CHECK(scaled_expint(2, 700.0) == doctest::Approx(0.001424507189379315750).epsilon(1e-12));
}
