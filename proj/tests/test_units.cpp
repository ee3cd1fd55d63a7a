#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rephase/error.hpp"
#include "rephase/units.hpp"

using namespace rephase;

TEST(Units, LowEarthOrbitScales) {
    const double r = 6778137.0, mu = 3.986004418e14;
    const auto s = make_scales(r, mu);
    EXPECT_DOUBLE_EQ(s.length_unit, r);
    EXPECT_NEAR(s.time_unit, std::sqrt(r * r * r / mu), 1e-9);
    // One canonical period is the orbital period.
    EXPECT_NEAR(s.to_seconds(2.0 * std::numbers::pi), 2.0 * std::numbers::pi * std::sqrt(r * r * r / mu), 1e-6);
    EXPECT_NEAR(s.accel_unit, mu / (r * r), 1e-12);
}

TEST(Units, RoundTrips) {
    const auto s = make_scales(7.0e6, 4.0e14);
    EXPECT_NEAR(s.to_meters(s.to_canonical_length(1234.5)), 1234.5, 1e-9);
    EXPECT_NEAR(s.to_seconds(s.to_canonical_time(86400.0)), 86400.0, 1e-9);
    EXPECT_NEAR(s.to_mps2(s.to_canonical_accel(1e-4)), 1e-4, 1e-18);
}

TEST(Units, RejectsBadScales) {
    EXPECT_THROW(make_scales(0.0, 1.0), DomainError);
    EXPECT_THROW(make_scales(1.0, -1.0), DomainError);
    EXPECT_THROW(make_scales(INFINITY, 1.0), DomainError);
}

TEST(Units, Nondimensionalize) {
    const auto s = make_scales(6778137.0, 3.986004418e14);
    const auto p = nondimensionalize_problem(-0.1, 1e-3, s);
    EXPECT_DOUBLE_EQ(p.dt_f, -0.1);
    EXPECT_NEAR(p.a_max, 1e-3 / s.accel_unit, 1e-15);
    EXPECT_THROW(nondimensionalize_problem(4.0, 1e-3, s), DomainError);
    EXPECT_THROW(nondimensionalize_problem(0.1, 0.0, s), DomainError);
}
