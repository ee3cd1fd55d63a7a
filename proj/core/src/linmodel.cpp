#include "rephase/linmodel.hpp"

#include <cmath>

#include "rephase/error.hpp"

namespace rephase {

double ControlLVLH::magnitude() const { return std::hypot(a_r, a_th); }

double ControlLVLH::gamma() const { return std::atan2(a_r, a_th); }

ControlLVLH from_magnitude_angle(double magnitude, double gamma) {
    return {magnitude * std::sin(gamma), magnitude * std::cos(gamma)};
}

LinState lin_rhs(double L, const LinState& s, const ControlLVLH& u) {
    const double c = std::cos(L);
    const double sn = std::sin(L);
    return {
        2.0 * u.a_th,
        u.a_r * sn + 2.0 * u.a_th * c,
        -u.a_r * c + 2.0 * u.a_th * sn,
        1.5 * s.dp - 2.0 * s.df * c - 2.0 * s.dg * sn,
    };
}

double dt_reduced_rhs(double L, const ControlLVLH& u) { return 2.0 * u.a_r - 3.0 * L * u.a_th; }

LinCostates costates_closed_form(double L, double l0, double l1) {
    return {-1.5 * l0 * L, 2.0 * l0 * std::sin(L), l0 * (l1 - 2.0 * std::cos(L))};
}

double primer_radial(double L, double l1) {
    // l1 cos L - 2 = (l1 - 2) - 2 l1 sin^2(L/2); l1 - 2 is exact near 2.
    const double h = std::sin(0.5 * L);
    return (l1 - 2.0) - 2.0 * l1 * h * h;
}

double primer_transversal(double L, double l1) { return 3.0 * L - 2.0 * l1 * std::sin(L); }

double primer_norm(double L, double l1) {
    return std::hypot(primer_transversal(L, l1), primer_radial(L, l1));
}

UnitDirection unit_control_direction(double L, double l1, Sign sign_l0) {
    const double radial = primer_radial(L, l1);
    const double transversal = primer_transversal(L, l1);
    const double norm = std::hypot(radial, transversal);
    if (norm < kSingularPrimerNorm) {
        throw SingularDirectionError("thrust direction undefined: primer norm vanishes", L);
    }
    const double s = value(sign_l0) / norm;
    return {s * radial, s * transversal};
}

ControlLVLH optimal_control(double L, double l1, Sign sign_l0, double magnitude) {
    const auto dir = unit_control_direction(L, l1, sign_l0);
    return {magnitude * dir.u_r, magnitude * dir.u_th};
}

}  // namespace rephase

namespace rephase {

numerics::OdeSolution propagate_linear(const ControlLaw& control, double delta_L,
                                       const numerics::IntegratorSettings& settings,
                                       std::span<const double> breakpoints) {
    auto rhs = [&control](double L, std::span<const double> y, std::span<double> dy) {
        const ControlLVLH u = control(L);
        const LinState d = lin_rhs(L, {y[kDp], y[kDf], y[kDg], y[kDt]}, u);
        dy[kDp] = d.dp;
        dy[kDf] = d.df;
        dy[kDg] = d.dg;
        dy[kDt] = d.dt;
        dy[kDtReduced] = dt_reduced_rhs(L, u);
        dy[kVelocity] = u.magnitude();
    };
    return numerics::integrate(rhs, -0.5 * delta_L, 0.5 * delta_L,
                               std::vector<double>(kLinTrajectoryDim, 0.0), settings, breakpoints);
}

}  // namespace rephase
