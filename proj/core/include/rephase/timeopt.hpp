#pragma once

#include <cmath>
#include <optional>

#include "rephase/linmodel.hpp"
#include "rephase/numerics/settings.hpp"

namespace rephase::timeopt {

/// Time-optimal rephasing on the linearized dynamics. The whole family is
/// parametrized by chi = -sign(l0) * dt_f / a_max > 0.
struct TimeOptProblem {
    double chi;
    double a_max;
    double dt_f;

    Sign sign_l0() const { return dt_f > 0.0 ? Sign::minus : Sign::plus; }

    /// Unit thrust with the positive-l0 branch (dt_f < 0).
    static TimeOptProblem from_chi(double chi, double a_max = 1.0);
    static TimeOptProblem from_boundary(double dt_f, double a_max);
};

struct TimeOptSolution {
    double delta_L;
    double l1;
    Sign sign_l0;
    double chi;
    double a_max;
    double dt_f;
    /// Time of flight, dt_f + delta_L.
    double tof;
    int iterations = 0;
    /// Residuals (f1, f2 - chi) at the returned point.
    double residual_f1 = 0.0;
    double residual_f2 = 0.0;

    /// |l0| implied by the vanishing final Hamiltonian; the control law does
    /// not depend on it.
    double lambda0_transversality() const;
    LinCostates costates_at(double L) const;
    ControlLVLH control_at(double L) const;
};

/// Quadratures over the half arc [0, dL/2] that define the reduced shooting
/// problem: f1 (the dg residual), f2 (the dt integral, equal to chi on the
/// solution) and d f1 / d l1.
struct ShootingIntegrals {
    double f1;
    double f2;
    double df1_dl1;
};

ShootingIntegrals shooting_integrals(double delta_L, double l1,
                                     const numerics::QuadSettings& quad = {});

double f1(double delta_L, double l1, const numerics::QuadSettings& quad = {});
double f2(double delta_L, double l1, const numerics::QuadSettings& quad = {});

struct Partials {
    double d_delta_L;
    double d_l1;
};

/// Boundary term for d/d(dL); quadrature for d/d(l1) (always negative).
Partials f1_partials(double delta_L, double l1, const numerics::QuadSettings& quad = {});
/// d f2 / d l1 = 2 l1 d f1 / d l1.
Partials f2_partials(double delta_L, double l1, const numerics::QuadSettings& quad = {});

/// Integrands of f1, f2 and d f1 / d l1 at one longitude.
struct Integrands {
    double f1;
    double f2;
    double df1_dl1;
};
Integrands integrands(double L, double l1);

/// Unique root of f1(dL, .) by safeguarded Newton. The seed defaults to the
/// short-term analytic value for dL < 1 and the Fourier fit otherwise.
double solve_lambda1(double delta_L, std::optional<double> seed = std::nullopt,
                     const numerics::RootSettings& settings = {},
                     const numerics::QuadSettings& quad = {});

/// chi reached with the exact l1 at the given dL, i.e. the largest
/// time offset per unit thrust that a transfer of span dL can absorb.
double chi_exact(double delta_L, const numerics::QuadSettings& quad = {});

enum class Strategy { double_loop, hybrid2d };

struct TimeOptOptions {
    Strategy strategy = Strategy::double_loop;
    numerics::RootSettings root{};
    numerics::QuadSettings quad{};
    /// Total attempts; later ones perturb the seed.
    int max_attempts = 3;
};

/// Solves the reduced two-dimensional shooting problem. The chi residual is
/// converged relative to max(1, chi). Throws NonconvergenceError once every
/// attempt fails.
TimeOptSolution solve_time_optimal(const TimeOptProblem& problem,
                                   const TimeOptOptions& options = {});

/// Piecewise Fourier fit of l1 versus dL, split at dL = 10. Fitted on
/// (0, 125]; larger arguments extrapolate the second branch unvalidated.
double approx_lambda1(double delta_L);

/// Three-segment fit of dL versus chi.
double approx_deltaL(double chi);

/// Inverse of approx_deltaL: the largest chi reachable within dL.
double chi_max(double delta_L);

struct ShortTermSolution {
    double alpha;  // 2 - l1
    double y;      // root of sinh(y) = 4 y / dL
    double l1;
};

/// Small-dL approximation l1 = 2 - alpha with alpha = dL^2 / (8 y). Requires
/// 0 < dL < 4 so that the transcendental equation has a positive root.
ShortTermSolution short_term_alpha(double delta_L);

inline double short_term_delta_L(double chi) { return 2.0 * std::sqrt(chi); }
inline double long_term_delta_L(double chi) { return 2.0 * std::sqrt(chi / 3.0); }

}  // namespace rephase::timeopt
