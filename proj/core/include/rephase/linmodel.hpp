#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "rephase/numerics/integrate.hpp"

// Linearized rephasing dynamics about a circular orbit, written with true
// longitude as the independent variable. The transfer always spans
// L in [-dL/2, +dL/2].

namespace rephase {

/// Sign of the constant time costate. Selects which of the two mirrored
/// solution branches a control law belongs to.
enum class Sign : int { minus = -1, plus = 1 };

constexpr double value(Sign s) { return static_cast<double>(static_cast<int>(s)); }
constexpr Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
constexpr Sign sign_of(double x) { return x < 0.0 ? Sign::minus : Sign::plus; }

/// Deviations of (p, f, g, t) from the nominal circular orbit.
struct LinState {
    double dp = 0.0;
    double df = 0.0;
    double dg = 0.0;
    double dt = 0.0;
};

/// Thrust acceleration in the local-vertical/local-horizontal frame.
struct ControlLVLH {
    double a_r = 0.0;
    double a_th = 0.0;

    double magnitude() const;
    /// Orientation measured from the transversal direction, radians.
    double gamma() const;
};

struct LinCostates {
    double l_dp;
    double l_df;
    double l_dg;
};

struct UnitDirection {
    double u_r;
    double u_th;
};

ControlLVLH from_magnitude_angle(double magnitude, double gamma);

/// d/dL of the linearized state under the given control.
LinState lin_rhs(double L, const LinState& state, const ControlLVLH& ctrl);

/// Integrand whose quadrature over the full arc equals the final time offset
/// once the p, f, g boundary conditions are met at both ends. Not a
/// substitute for the dt row of lin_rhs along the trajectory.
double dt_reduced_rhs(double L, const ControlLVLH& ctrl);

/// Euler-Lagrange solution with p and f costates vanishing at the mid-point.
LinCostates costates_closed_form(double L, double l0, double l1);

/// Norm of the primer vector divided by |l0|:
/// sqrt((3L - 2 l1 sin L)^2 + (l1 cos L - 2)^2).
double primer_norm(double L, double l1);

/// l1*cos(L) - 2 evaluated without cancellation near l1 = 2, L = 0.
double primer_radial(double L, double l1);
double primer_transversal(double L, double l1);

/// Smallest primer norm accepted before the direction is declared singular.
inline constexpr double kSingularPrimerNorm = 1e-14;

/// Optimal thrust direction. Throws SingularDirectionError when the primer
/// norm drops below kSingularPrimerNorm.
UnitDirection unit_control_direction(double L, double l1, Sign sign_l0);

/// Full-thrust control along the optimal direction.
ControlLVLH optimal_control(double L, double l1, Sign sign_l0, double magnitude);


/// Indices into the state vector carried by propagate_linear.
enum LinTrajectoryIndex : std::size_t {
    kDp = 0,
    kDf = 1,
    kDg = 2,
    kDt = 3,
    kDtReduced = 4,  // running integral of dt_reduced_rhs
    kVelocity = 5,   // running integral of the thrust magnitude
    kLinTrajectoryDim = 6,
};

using ControlLaw = std::function<ControlLVLH(double L)>;

/// Integrates the linearized dynamics from L0 = -dL/2 to Lf = +dL/2 starting
/// on the nominal orbit.
numerics::OdeSolution propagate_linear(const ControlLaw& control, double delta_L,
                                       const numerics::IntegratorSettings& settings = {},
                                       std::span<const double> breakpoints = {});

}  // namespace rephase
