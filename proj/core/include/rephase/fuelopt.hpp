#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rephase/linmodel.hpp"
#include "rephase/numerics/settings.hpp"

// Propellant-optimal rephasing on the linearized dynamics with a fixed
// longitude span. The throttle is the tanh-smoothed bang-bang law driven by
// the switching function rho = 1 - |l0| D(L).

namespace rephase::fuelopt {

struct FuelOptProblem {
    double delta_L;
    /// Slack parameter: chi = (1 - eta^2) * chi_max(delta_L).
    double eta;
    double a_max;
    double epsilon;
    double chi;
    /// chi reachable by the time-optimal transfer over delta_L.
    double chi_max;
    Sign sign_l0 = Sign::plus;

    static FuelOptProblem from_eta(double delta_L, double eta, double epsilon = 0.01,
                                   double a_max = 1.0);
    /// Throws InfeasibleError when delta_L is shorter than the time-optimal
    /// span for the implied chi.
    static FuelOptProblem from_boundary(double delta_L, double dt_f, double a_max,
                                        double epsilon = 0.01);

    double dt_f() const { return -value(sign_l0) * chi * a_max; }
    FuelOptProblem with_epsilon(double eps) const;
};

/// Roots of rho inside the open arc and the sign of rho on each of the
/// roots.size() + 1 pieces between them.
struct SwitchingProfile {
    std::vector<double> roots;
    std::vector<int> signs;
};

struct BurnArcs {
    int n_arcs;
    SwitchingProfile profile;
};

enum class SeedSource { caller, atlas, analytic, random, continuation };
std::string to_string(SeedSource s);

struct FuelOptSolution {
    FuelOptProblem problem;
    double l0;
    double l1;
    /// Velocity increment, integral of the thrust magnitude over the arc.
    double J;
    int n_arcs;
    std::array<double, 2> residual{};
    int iterations = 0;
    int attempts = 0;
    SeedSource seed_source = SeedSource::caller;

    double epsilon() const { return problem.epsilon; }
    double J_norm() const { return J / (problem.a_max * problem.delta_L); }
    double rho_at(double L) const;
    double magnitude_at(double L) const;
    ControlLVLH control_at(double L) const;
    /// Costates of the linearized states, scaled by l0.
    LinCostates costates_at(double L) const;
};

double switching_rho(double L, double l0, double l1);
double smoothed_magnitude(double rho, double epsilon, double a_max);

struct Seed {
    double l0;
    double l1;
    SeedSource source = SeedSource::caller;
};

struct FuelOptOptions {
    numerics::RootSettings root{1e-10, 200, 1.0};
    numerics::QuadSettings quad{};
    /// The Jacobian integrand carries roundoff amplified by 1/epsilon, so it
    /// is integrated to a looser tolerance.
    numerics::QuadSettings jacobian_quad{1e-9, 4000};
    /// Try the switch-condition seed after the supplied ones.
    bool analytic_seed = true;
    /// Random draws after the supplied seeds and the analytic seed fail.
    int random_attempts = 20;
    std::uint64_t rng_seed = 20240229;
    /// Random l0 is drawn from [0, l0_range / delta_L], l1 from [-l1_range, l1_range].
    double l0_range = 10.0;
    double l1_range = 4.0;
    /// Grid size for the sign scan of rho on the whole arc.
    int scan_points = 4001;
    /// Below this epsilon the quadrature splits at the switching points.
    double split_epsilon = 1e-3;
};

/// Full-arc residuals: the dg integral and the dt integral minus chi, both
/// per unit a_max. Requires l0 > 0.
std::array<double, 2> fuel_residual(double l0, double l1, const FuelOptProblem& problem,
                                    const FuelOptOptions& options = {});

/// d(residual_i)/d(l0, l1), row major.
std::array<double, 4> fuel_jacobian(double l0, double l1, const FuelOptProblem& problem,
                                    const FuelOptOptions& options = {});

/// Tries every seed in order, then the switch-condition estimate, then
/// random draws. Throws NonconvergenceError listing each failed attempt.
FuelOptSolution solve_fuel_optimal(const FuelOptProblem& problem,
                                   const std::vector<Seed>& seeds = {},
                                   const FuelOptOptions& options = {});

struct Continuation {
    FuelOptSolution solution;
    /// Every epsilon solved along the way, starting one.
    std::vector<double> path;
};

/// Geometric epsilon schedule from the solution's epsilon down to target,
/// dividing by factor per step and warm-starting each solve. A failed step is
/// retried with the step halved (in log scale) up to max_refinements times;
/// after that NonconvergenceError names the last epsilon that converged.
Continuation continue_epsilon(const FuelOptSolution& start, double epsilon_target,
                              double factor = 10.0, const FuelOptOptions& options = {},
                              int max_refinements = 4);

BurnArcs count_burn_arcs(double l0, double l1, double delta_L, int scan_points = 4001);

enum class Regime { short_term, long_term };

struct AnalyticEstimate {
    double l0;
    double l1;
    double J;
};

/// Asymptotic solution; J = (1 - eta) a_max dL in both regimes.
AnalyticEstimate analytic_fuel_estimate(double delta_L, double eta, Regime regime,
                                        double a_max = 1.0);

/// Seed valid at any span: exact time-optimal l1 and l0 from rho = 0 at
/// |L| = eta dL / 2.
Seed switch_condition_seed(double delta_L, double eta);

}  // namespace rephase::fuelopt
