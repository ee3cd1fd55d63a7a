#include "rephase/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rephase/error.hpp"
#include "rephase/numerics/hybrid_solve.hpp"

namespace rephase::nonlinear {

namespace {

struct Geometry {
    double s, c, w, sqp;
    double h1, h2;  // transversal columns of B without the sqrt(p) factor
};

Geometry geometry(const EquinoctialState& st) {
    if (!(st.p > 0.0)) throw DomainError("semi-latus rectum must stay positive");
    const double s = std::sin(st.L), c = std::cos(st.L);
    const double w = 1.0 + st.f * c + st.g * s;
    if (!(w > 0.0)) throw DomainError("orbit radius factor w must stay positive");
    return {s, c, w, std::sqrt(st.p), c + (c + st.f) / w, s + (s + st.g) / w};
}

Sign time_sign(double dt_f) { return dt_f > 0.0 ? Sign::minus : Sign::plus; }

}  // namespace

double radius_factor(const EquinoctialState& s) {
    return 1.0 + s.f * std::cos(s.L) + s.g * std::sin(s.L);
}

StateRates equinoctial_rhs(const EquinoctialState& st, const ControlLVLH& a) {
    const Geometry g = geometry(st);
    const double inv_A = st.p * g.sqp / (g.w * g.w);
    const double k = g.sqp * inv_A;
    return {k * 2.0 * st.p * a.a_th / g.w, k * (g.s * a.a_r + g.h1 * a.a_th),
            k * (-g.c * a.a_r + g.h2 * a.a_th), inv_A};
}

std::array<double, 3> costate_rhs(const EquinoctialState& st, const NonlinCostates& cs,
                                  const ControlLVLH& a, PhiKind kind) {
    const Geometry g = geometry(st);
    const double p = st.p, w = g.w, s = g.s, c = g.c;
    const double w2 = w * w, w3 = w2 * w;
    const double ar = a.a_r, ath = a.a_th;

    // B a / A = q * m with q = p^2 / w^2.
    const double q = p * p / w2;
    const double dq[3] = {2.0 * p / w2, -2.0 * p * p * c / w3, -2.0 * p * p * s / w3};
    const double m0 = 2.0 * p * ath / w;
    const double m1 = s * ar + g.h1 * ath;
    const double m2 = -c * ar + g.h2 * ath;
    const double dm0[3] = {2.0 * ath / w, -2.0 * p * ath * c / w2, -2.0 * p * ath * s / w2};
    const double dm1[3] = {0.0, (1.0 / w - (c + st.f) * c / w2) * ath,
                           -(c + st.f) * s / w2 * ath};
    const double dm2[3] = {0.0, -(s + st.g) * c / w2 * ath,
                           (1.0 / w - (s + st.g) * s / w2) * ath};

    // 1 / A = p^{3/2} / w^2.
    const double sqp = g.sqp;
    const double dG[3] = {1.5 * sqp / w2, -2.0 * p * sqp * c / w3, -2.0 * p * sqp * s / w3};

    const double phi = kind == PhiKind::time ? 1.0 : a.magnitude();
    const double cphi = cs.lt + phi;
    std::array<double, 3> out{};
    for (int j = 0; j < 3; ++j) {
        const double dF0 = dq[j] * m0 + q * dm0[j];
        const double dF1 = dq[j] * m1 + q * dm1[j];
        const double dF2 = dq[j] * m2 + q * dm2[j];
        out[j] = -(cs.lx[0] * dF0 + cs.lx[1] * dF1 + cs.lx[2] * dF2) - cphi * dG[j];
    }
    return out;
}

std::array<double, 2> primer(const EquinoctialState& st, const std::array<double, 3>& lx) {
    const Geometry g = geometry(st);
    return {g.sqp * (g.s * lx[1] - g.c * lx[2]),
            g.sqp * (2.0 * st.p / g.w * lx[0] + g.h1 * lx[1] + g.h2 * lx[2])};
}

ControlLVLH nonlinear_control(const EquinoctialState& st, const NonlinCostates& cs, PhiKind kind,
                              double a_max, double epsilon) {
    const auto v = primer(st, cs.lx);
    const double n = std::hypot(v[0], v[1]);
    if (!(n > kSingularPrimerNorm)) {
        throw SingularDirectionError("primer vector vanishes", st.L);
    }
    const double mag = kind == PhiKind::time
                           ? a_max
                           : fuelopt::smoothed_magnitude(1.0 - n, epsilon, a_max);
    return {-mag * v[0] / n, -mag * v[1] / n};
}

numerics::OdeSolution propagate_nonlinear(const Arc& arc, const NonlinCostates& c0,
                                          const numerics::IntegratorSettings& settings) {
    const double lt = c0.lt;
    auto rhs = [&](double L, std::span<const double> y, std::span<double> dy) {
        const EquinoctialState st{y[kP], y[kF], y[kG], L, y[kT]};
        const NonlinCostates cs{{y[kLp], y[kLf], y[kLg]}, lt};
        const ControlLVLH a = nonlinear_control(st, cs, arc.kind, arc.a_max, arc.epsilon);
        const StateRates r = equinoctial_rhs(st, a);
        const auto dl = costate_rhs(st, cs, a, arc.kind);
        dy[kP] = r.dp;
        dy[kF] = r.df;
        dy[kG] = r.dg;
        dy[kT] = r.dt;
        dy[kLp] = dl[0];
        dy[kLf] = dl[1];
        dy[kLg] = dl[2];
        dy[kJ] = a.magnitude() * r.dt;
    };
    std::vector<double> y0{1.0, 0.0, 0.0, 0.0, c0.lx[0], c0.lx[1], c0.lx[2], 0.0};
    return numerics::integrate(rhs, arc.L0, arc.Lf, std::move(y0), settings);
}

MappedGuess map_linear_costates(const timeopt::TimeOptSolution& lin) {
    const LinCostates c = lin.costates_at(-0.5 * lin.delta_L);
    return {{{c.l_dp, c.l_df, c.l_dg}, value(lin.sign_l0) - 1.0}, lin.delta_L};
}

MappedGuess map_linear_costates(const fuelopt::FuelOptSolution& lin) {
    const LinCostates c = lin.costates_at(-0.5 * lin.problem.delta_L);
    return {{{c.l_dp, c.l_df, c.l_dg}, value(lin.problem.sign_l0) * lin.l0},
            lin.problem.delta_L};
}

NonlinProblem NonlinProblem::time(double dt_f, double a_max) {
    if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
    if (dt_f == 0.0 || !std::isfinite(dt_f)) throw DomainError("final time offset must be nonzero");
    return {PhiKind::time, dt_f, a_max, 0.0, 0.0};
}

NonlinProblem NonlinProblem::fuel(double delta_L, double dt_f, double a_max, double epsilon) {
    if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
    if (!(delta_L > 0.0)) throw DomainError("true longitude span must be positive");
    if (!(epsilon > 0.0)) throw DomainError("smoothing parameter must be positive");
    return {PhiKind::fuel, dt_f, a_max, delta_L, epsilon};
}

std::array<double, 4> shooting_residual(const NonlinProblem& problem, const MappedGuess& z,
                                        const NonlinOptions& options) {
    const double dL = z.delta_L;
    if (!(dL > 0.0)) throw DomainError("true longitude span must be positive");
    const Arc arc{problem.kind, problem.a_max, problem.epsilon, -0.5 * dL, 0.5 * dL};
    const auto sol = propagate_nonlinear(arc, z.costates, options.integrator);
    const auto y = sol.final_state();
    return {y[kP] - 1.0, y[kF], y[kG], y[kT] - (dL + problem.dt_f)};
}

NonlinSolution solve_nonlinear(const NonlinProblem& problem, const MappedGuess& guess,
                               const NonlinOptions& options) {
    const bool is_time = problem.kind == PhiKind::time;
    const double lt_time = value(time_sign(problem.dt_f)) - 1.0;

    auto unpack = [&](const Eigen::VectorXd& z) {
        MappedGuess m;
        m.costates.lx = {z(0), z(1), z(2)};
        if (is_time) {
            m.costates.lt = lt_time;
            m.delta_L = z(3);
        } else {
            m.costates.lt = z(3);
            m.delta_L = problem.delta_L;
        }
        return m;
    };
    auto F = [&](const Eigen::VectorXd& z) {
        const auto r = shooting_residual(problem, unpack(z), options);
        return Eigen::Vector4d(r[0], r[1], r[2], r[3]).eval();
    };

    Eigen::VectorXd z0(4);
    z0 << guess.costates.lx[0], guess.costates.lx[1], guess.costates.lx[2],
        is_time ? guess.delta_L : guess.costates.lt;

    numerics::HybridResult r;
    try {
        r = numerics::hybrid_solve(F, z0, options.root);
    } catch (const NonconvergenceError& e) {
        std::ostringstream os;
        os << "nonlinear " << (is_time ? "time" : "fuel") << "-optimal shooting failed: "
           << e.what();
        throw NonconvergenceError(os.str(), e.last_point, e.last_residual, e.iterations,
                                  e.residual_history);
    }

    const MappedGuess m = unpack(r.z);
    NonlinSolution out;
    out.kind = problem.kind;
    out.costates = m.costates;
    out.delta_L = m.delta_L;
    out.dt_f = problem.dt_f;
    out.a_max = problem.a_max;
    out.epsilon = is_time ? 0.0 : problem.epsilon;
    out.tof = m.delta_L + problem.dt_f;
    const auto traj = propagate_nonlinear(out.arc(), out.costates, options.integrator);
    out.J = traj.final_state()[kJ];
    for (int i = 0; i < 4; ++i) out.residual[i] = r.residual(i);
    out.iterations = r.iterations;
    out.residual_history = r.residual_history;
    return out;
}

NonlinContinuation continue_epsilon(const NonlinSolution& start, double epsilon_target,
                                double factor, const NonlinOptions& options,
                                int max_refinements) {
    if (start.kind != PhiKind::fuel) throw DomainError("continuation applies to fuel solutions");
    if (!(epsilon_target > 0.0)) throw DomainError("smoothing parameter must be positive");
    if (!(factor > 1.0)) throw DomainError("continuation factor must exceed 1");
    NonlinSolution cur = start;
    std::vector<double> path{cur.epsilon};
    double step = factor;
    int refinements = 0;
    while (cur.epsilon > epsilon_target) {
        double next = cur.epsilon / step;
        // Land exactly on the target instead of a rounding step short of it.
        if (next < epsilon_target * (1.0 + 1e-9)) next = epsilon_target;
        try {
            const auto problem = NonlinProblem::fuel(cur.delta_L, cur.dt_f, cur.a_max, next);
            cur = solve_nonlinear(problem, {cur.costates, cur.delta_L}, options);
            path.push_back(next);
            step = factor;
            refinements = 0;
        } catch (const NonconvergenceError& e) {
            if (++refinements > max_refinements) {
                std::ostringstream os;
                os.precision(17);
                os << "epsilon continuation stalled; last converged epsilon " << cur.epsilon
                   << "\n" << e.what();
                throw NonconvergenceError(os.str(), e.last_point, e.last_residual, refinements);
            }
            step = std::sqrt(step);
        }
    }
    return {cur, path};
}

int count_burn_arcs(const NonlinSolution& sol, int samples,
                    const numerics::IntegratorSettings& settings) {
    if (samples < 3) throw DomainError("burn arc scan needs at least 3 points");
    const auto traj = propagate_nonlinear(sol.arc(), sol.costates, settings);
    const double L0 = sol.L0();
    int arcs = 0;
    bool burning = false;
    for (int i = 0; i < samples; ++i) {
        const double L = L0 + sol.delta_L * i / (samples - 1);
        const auto y = traj(L);
        const auto v = primer({y[kP], y[kF], y[kG], L, y[kT]}, {y[kLp], y[kLf], y[kLg]});
        const bool b = std::hypot(v[0], v[1]) > 1.0;
        if (b && !burning) ++arcs;
        burning = b;
    }
    return arcs;
}

}  // namespace rephase::nonlinear
