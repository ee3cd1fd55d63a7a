#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rephase/fuelopt.hpp"
#include "rephase/nonlinear.hpp"
#include "rephase/timeopt.hpp"

using namespace rephase;

namespace {

constexpr double kTol = 1e-9;

void expect_symmetric(const ControlLaw& u, double dL, double a_max) {
    for (int k = 0; k <= 50; ++k) {
        const double L = 0.5 * dL * k / 50.0;
        const auto p = u(L), m = u(-L);
        EXPECT_NEAR(p.a_r, m.a_r, kTol * a_max) << L;
        EXPECT_NEAR(p.a_th, -m.a_th, kTol * a_max) << L;
    }
}

// p and f return to nominal; the full dt row agrees with the reduced one.
void expect_boundary(const ControlLaw& u, double dL, double dt_f,
                     std::span<const double> breaks = {}) {
    const auto traj = propagate_linear(u, dL, {}, breaks);
    const auto y = traj.final_state();
    EXPECT_LE(std::abs(y[kDp]), kTol);
    EXPECT_LE(std::abs(y[kDf]), kTol);
    EXPECT_LE(std::abs(y[kDt] - y[kDtReduced]), kTol * std::max(1.0, std::abs(y[kDt])));
    EXPECT_LE(std::abs(y[kDt] - dt_f), kTol * std::max(1.0, std::abs(dt_f)));
}

}  // namespace

TEST(Properties, TimeOptimalSolutions) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> logchi(std::log(1e-4), std::log(1e4));
    for (int k = 0; k < 40; ++k) {
        const double chi = std::exp(logchi(rng));
        const double a_max = k % 2 ? 1.0 : 0.01;
        const double dt_f = (k % 3 ? -1.0 : 1.0) * chi * a_max;
        const auto s = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(dt_f, a_max));
        const ControlLaw u = [&](double L) { return s.control_at(L); };
        SCOPED_TRACE(chi);
        expect_symmetric(u, s.delta_L, a_max);
        expect_boundary(u, s.delta_L, dt_f);
    }
}

TEST(Properties, FuelOptimalSolutions) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> udl(0.3, 60.0), ueta(0.3, 0.9);
    for (int k = 0; k < 20; ++k) {
        const double eps = k % 2 ? 0.05 : 0.01;
        const auto s = fuelopt::solve_fuel_optimal(
            fuelopt::FuelOptProblem::from_eta(udl(rng), ueta(rng), eps, 0.01));
        const auto& p = s.problem;
        SCOPED_TRACE(p.delta_L);
        EXPECT_GT(s.J_norm(), 0.0);
        EXPECT_LT(s.J_norm(), 1.0);
        const ControlLaw u = [&](double L) { return s.control_at(L); };
        expect_symmetric(u, p.delta_L, p.a_max);
        const auto arcs = fuelopt::count_burn_arcs(s.l0, s.l1, p.delta_L);
        expect_boundary(u, p.delta_L, p.dt_f(), arcs.profile.roots);
    }
}

TEST(Properties, NonlinearRepropagation) {
    const auto lin = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(-0.1, 0.01));
    const auto s = nonlinear::solve_nonlinear(nonlinear::NonlinProblem::time(-0.1, 0.01),
                                              nonlinear::map_linear_costates(lin));
    const auto sol = nonlinear::propagate_nonlinear(s.arc(), s.costates, {1e-13, 1e-13, 2'000'000, 0.0});
    const auto y = sol.final_state();
    EXPECT_LE(std::abs(y[nonlinear::kP] - 1.0), kTol);
    EXPECT_LE(std::abs(y[nonlinear::kF]), kTol);
    EXPECT_LE(std::abs(y[nonlinear::kG]), kTol);
    EXPECT_LE(std::abs(y[nonlinear::kT] - s.tof), kTol * s.tof);
}

TEST(Properties, CostateTimeComponentIsConstant) {
    // The propagated vector has no lt slot: lt is the value at L0 everywhere.
    // Check that this matches the equations by integrating -dH/dt with a
    // probe that perturbs t along the trajectory.
    const auto lin = fuelopt::solve_fuel_optimal(fuelopt::FuelOptProblem::from_eta(8.0, 0.6, 0.05, 0.001));
    const auto g = nonlinear::map_linear_costates(lin);
    const nonlinear::Arc arc{nonlinear::PhiKind::fuel, 0.001, 0.05, -4.0, 4.0};
    const auto traj = nonlinear::propagate_nonlinear(arc, g.costates);
    double drift = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double L = -4.0 + 8.0 * k / 200.0;
        const auto y = traj(L);
        nonlinear::EquinoctialState st{y[0], y[1], y[2], L, y[3]};
        const nonlinear::NonlinCostates cs{{y[4], y[5], y[6]}, g.costates.lt};
        const auto a = nonlinear::nonlinear_control(st, cs, arc.kind, arc.a_max, arc.epsilon);
        auto H = [&](double t) {
            st.t = t;
            const auto r = nonlinear::equinoctial_rhs(st, a);
            return cs.lx[0] * r.dp + cs.lx[1] * r.df + cs.lx[2] * r.dg + (cs.lt + a.magnitude()) * r.dt;
        };
        drift = std::max(drift, std::abs(H(y[3] + 1e-3) - H(y[3] - 1e-3)) / 2e-3 * 8.0);
    }
    EXPECT_LE(drift, 1e-10);
}
