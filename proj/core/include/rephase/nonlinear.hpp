#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rephase/fuelopt.hpp"
#include "rephase/linmodel.hpp"
#include "rephase/numerics/integrate.hpp"
#include "rephase/numerics/settings.hpp"
#include "rephase/timeopt.hpp"

// Planar equinoctial dynamics (h = k = 0, mu = 1) with the true longitude as
// independent variable, and the matching costate equations for the time and
// propellant problems.

namespace rephase::nonlinear {

struct EquinoctialState {
    double p = 1.0;
    double f = 0.0;
    double g = 0.0;
    double L = 0.0;
    double t = 0.0;
};

/// d/dL of (p, f, g, t).
struct StateRates {
    double dp;
    double df;
    double dg;
    double dt;
};

struct NonlinCostates {
    std::array<double, 3> lx{};
    double lt = 0.0;
};

enum class PhiKind { time, fuel };

/// w = 1 + f cos L + g sin L.
double radius_factor(const EquinoctialState& s);

/// Throws DomainError when p <= 0 or w <= 0.
StateRates equinoctial_rhs(const EquinoctialState& s, const ControlLVLH& a);

/// -dH/dx at fixed control. phi is 1 for the time problem and the thrust
/// magnitude for the propellant problem.
std::array<double, 3> costate_rhs(const EquinoctialState& s, const NonlinCostates& c,
                                  const ControlLVLH& a, PhiKind kind);

/// B^T lx split into radial and transversal parts.
std::array<double, 2> primer(const EquinoctialState& s, const std::array<double, 3>& lx);

/// Minimizing control. Time: full thrust against the primer. Fuel: throttle
/// from the smoothed switching function 1 - |B^T lx|. Throws
/// SingularDirectionError when the primer vanishes.
ControlLVLH nonlinear_control(const EquinoctialState& s, const NonlinCostates& c, PhiKind kind,
                              double a_max, double epsilon = 0.0);

/// Indices of the propagated vector.
enum NonlinIndex : std::size_t {
    kP = 0,
    kF = 1,
    kG = 2,
    kT = 3,
    kLp = 4,
    kLf = 5,
    kLg = 6,
    kJ = 7,  // running integral of the thrust magnitude over time
    kNonlinDim = 8,
};

struct Arc {
    PhiKind kind;
    double a_max;
    double epsilon = 0.0;
    double L0;
    double Lf;
};

/// State and costates from the nominal orbit at arc.L0 to arc.Lf.
numerics::OdeSolution propagate_nonlinear(const Arc& arc, const NonlinCostates& c0,
                                          const numerics::IntegratorSettings& settings = {});

/// Costate guess at L0 = -dL/2 from a linear solution.
struct MappedGuess {
    NonlinCostates costates;
    double delta_L;
};
MappedGuess map_linear_costates(const timeopt::TimeOptSolution& lin);
MappedGuess map_linear_costates(const fuelopt::FuelOptSolution& lin);

struct NonlinOptions {
    numerics::IntegratorSettings integrator{1e-12, 1e-12, 2'000'000, 0.0};
    numerics::RootSettings root{1e-10, 100, 0.01};
};

struct NonlinSolution {
    PhiKind kind;
    NonlinCostates costates;  // at L0
    double delta_L;
    double dt_f;
    double a_max;
    double epsilon;
    /// Velocity increment, integral of the thrust magnitude over time.
    double J;
    double tof;
    std::array<double, 4> residual{};
    int iterations = 0;
    /// Max-norm residual at the seed and every accepted iterate.
    std::vector<double> residual_history;

    double L0() const { return -0.5 * delta_L; }
    double J_norm() const { return J / (a_max * delta_L); }
    Arc arc() const { return {kind, a_max, epsilon, L0(), -L0()}; }
};

/// Boundary data for the nonlinear shooting problems. Time: (dt_f, a_max);
/// fuel adds a fixed delta_L and epsilon.
struct NonlinProblem {
    PhiKind kind;
    double dt_f;
    double a_max;
    double delta_L = 0.0;
    double epsilon = 0.0;

    static NonlinProblem time(double dt_f, double a_max);
    static NonlinProblem fuel(double delta_L, double dt_f, double a_max, double epsilon);
};

/// Four-dimensional shooting on [p(Lf) - 1, f(Lf), g(Lf), t(Lf) - dL - dt_f].
/// The unknowns are (lx, dL) for time with |lt + 1| = 1 and (lx, lt) for fuel.
/// Throws NonconvergenceError carrying the residual history.
NonlinSolution solve_nonlinear(const NonlinProblem& problem, const MappedGuess& guess,
                               const NonlinOptions& options = {});

struct NonlinContinuation {
    NonlinSolution solution;
    /// Every epsilon solved along the way, starting one.
    std::vector<double> path;
};

/// Geometric epsilon continuation of a converged fuel solution. Failed steps
/// are retried with the step halved in log scale.
NonlinContinuation continue_epsilon(const NonlinSolution& start, double epsilon_target,
                                double factor = 10.0, const NonlinOptions& options = {},
                                int max_refinements = 4);

/// Burn arcs (rho < 0) of a fuel solution, found by re-propagating and
/// scanning rho = 1 - |B^T lx| on `samples` evenly spaced longitudes.
int count_burn_arcs(const NonlinSolution& sol, int samples = 4001,
                    const numerics::IntegratorSettings& settings = {1e-12, 1e-12, 2'000'000, 0.0});

/// Residual of solve_nonlinear at the given unknowns.
std::array<double, 4> shooting_residual(const NonlinProblem& problem, const MappedGuess& z,
                                        const NonlinOptions& options = {});

}  // namespace rephase::nonlinear
