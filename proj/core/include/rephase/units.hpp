#pragma once

namespace rephase {

/// Conversion factors between SI quantities and canonical units in which the
/// initial circular radius and the gravitational parameter are both one, so
/// the nominal orbit period is 2*pi.
struct CanonicalScales {
    double length_unit;  // m
    double time_unit;    // s
    double accel_unit;   // m/s^2

    double to_canonical_length(double meters) const { return meters / length_unit; }
    double to_canonical_time(double seconds) const { return seconds / time_unit; }
    double to_canonical_accel(double mps2) const { return mps2 / accel_unit; }
    double to_meters(double length) const { return length * length_unit; }
    double to_seconds(double time) const { return time * time_unit; }
    double to_mps2(double accel) const { return accel * accel_unit; }
};

/// Throws DomainError unless both inputs are strictly positive and finite.
CanonicalScales make_scales(double radius_m, double mu_m3ps2);

/// Rephasing boundary data in canonical units.
struct CanonicalProblem {
    double dt_f;   // final time offset, equal to the phase difference [rad]
    double a_max;  // maximum thrust acceleration
};

/// Phase differences outside [-pi, pi] are rejected rather than wrapped.
CanonicalProblem nondimensionalize_problem(double phase_diff_rad, double thrust_accel_mps2,
                                           const CanonicalScales& scales);

}  // namespace rephase
