#include "rephase/units.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rephase/error.hpp"

namespace rephase {

CanonicalScales make_scales(double radius_m, double mu_m3ps2) {
    if (!(radius_m > 0.0) || !(mu_m3ps2 > 0.0) || !std::isfinite(radius_m) ||
        !std::isfinite(mu_m3ps2)) {
        throw DomainError("make_scales: radius and mu must be positive and finite");
    }
    const double time_unit = std::sqrt(radius_m * radius_m * radius_m / mu_m3ps2);
    return {radius_m, time_unit, radius_m / (time_unit * time_unit)};
}

CanonicalProblem nondimensionalize_problem(double phase_diff_rad, double thrust_accel_mps2,
                                           const CanonicalScales& scales) {
    if (!(std::abs(phase_diff_rad) <= std::numbers::pi)) {
        throw DomainError("phase difference " + std::to_string(phase_diff_rad) +
                          " rad outside [-pi, pi]; wrap it before calling");
    }
    if (!(thrust_accel_mps2 > 0.0) || !std::isfinite(thrust_accel_mps2)) {
        throw DomainError("thrust acceleration must be positive");
    }
    return {phase_diff_rad, scales.to_canonical_accel(thrust_accel_mps2)};
}

}  // namespace rephase
