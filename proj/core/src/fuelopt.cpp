#include "rephase/fuelopt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rephase/error.hpp"
#include "rephase/numerics/hybrid_solve.hpp"
#include "rephase/numerics/quadrature.hpp"
#include "rephase/numerics/scalar_root.hpp"
#include "rephase/timeopt.hpp"

namespace rephase::fuelopt {

namespace {

void check_span(double delta_L) {
    if (!(delta_L > 0.0) || !std::isfinite(delta_L)) {
        throw DomainError("true longitude span must be positive");
    }
}

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("smoothing parameter must be positive");
    }
}

// Normalized throttle u = a / a_max and its derivative with respect to rho.
struct Throttle {
    double u;
    double du_drho;
};

// Logistic form of (1 + tanh(-x)) / 2 with x = rho / epsilon; the derivative
// stays accurate far from the switch where 1 - tanh^2 would cancel.
Throttle throttle(double rho, double epsilon) {
    const double e = std::exp(-2.0 * std::abs(rho) / epsilon);
    const double small = e / (1.0 + e);
    const double u = rho > 0.0 ? small : 1.0 - small;
    return {u, -2.0 * small * (1.0 - small) / epsilon};
}

// Breakpoints on the half arc [0, dL/2] for the quadratures: every switching
// root plus a graded set of points at multiples of the transition width on
// both sides, so the Kronrod nodes see the throttle edge and the derivative
// spike. Near-tangent minima of |rho| get the same treatment.
std::vector<double> half_arc_breaks(double l0, double l1, const FuelOptProblem& problem,
                                    const FuelOptOptions& options) {
    if (problem.epsilon > options.split_epsilon) return {};
    const double hi = 0.5 * problem.delta_L;
    const double eps = problem.epsilon;
    const int n = std::max(options.scan_points / 2, 3);
    const double h = hi / (n - 1);
    auto rho = [&](double L) { return switching_rho(L, l0, l1); };

    std::vector<double> out;
    auto graded = [&](double center, double width) {
        out.push_back(center);
        if (!(width > 0.0) || !std::isfinite(width)) return;
        for (double k = 1.0; k * width < hi; k *= 4.0) {
            out.push_back(center - k * width);
            out.push_back(center + k * width);
        }
    };

    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = rho(i + 1 == n ? hi : i * h);
    for (int i = 1; i < n; ++i) {
        const double a = (i - 1) * h, b = i + 1 == n ? hi : i * h;
        if ((v[i - 1] < 0.0) != (v[i] < 0.0)) {
            const double r = numerics::bisect(rho, a, b);
            const double d = 1e-6 * std::max(1.0, std::abs(r));
            const double slope = std::abs(rho(r + d) - rho(r - d)) / (2.0 * d);
            graded(r, eps / std::max(slope, 1e-300));
        }
    }
    for (int i = 1; i + 1 < n; ++i) {
        const double m = std::abs(v[i]);
        const bool crossing = (v[i - 1] < 0.0) != (v[i] < 0.0) || (v[i] < 0.0) != (v[i + 1] < 0.0);
        if (crossing || m > 30.0 * eps) continue;
        if (m <= std::abs(v[i - 1]) && m <= std::abs(v[i + 1])) {
            const double curv = std::abs(v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h);
            graded(i * h, std::sqrt(eps / std::max(curv, 1e-300)));
        }
    }
    std::vector<double> inside;
    for (double x : out) {
        if (x > 0.0 && x < hi) inside.push_back(x);
    }
    std::sort(inside.begin(), inside.end());
    return inside;
}

void check_l0(double l0) {
    if (!(l0 > 0.0) || !std::isfinite(l0)) {
        throw DomainError("fuel residual needs l0 > 0");
    }
}

double velocity_integral(double l0, double l1, const FuelOptProblem& problem,
                         const FuelOptOptions& options) {
    const auto breaks = half_arc_breaks(l0, l1, problem, options);
    auto f = [&](double L) {
        return std::array<double, 1>{
            throttle(switching_rho(L, l0, l1), problem.epsilon).u};
    };
    const auto r = numerics::quad_adaptive_n<1>(f, 0.0, 0.5 * problem.delta_L, options.quad,
                                                breaks);
    return 2.0 * problem.a_max * r[0];
}

std::string describe(const Seed& s) {
    std::ostringstream os;
    os.precision(6);
    os << to_string(s.source) << " (" << s.l0 << ", " << s.l1 << ")";
    return os.str();
}

}  // namespace

std::string to_string(SeedSource s) {
    switch (s) {
        case SeedSource::caller: return "caller";
        case SeedSource::atlas: return "atlas";
        case SeedSource::analytic: return "analytic";
        case SeedSource::random: return "random";
        case SeedSource::continuation: return "continuation";
    }
    return "unknown";
}

FuelOptProblem FuelOptProblem::from_eta(double delta_L, double eta, double epsilon,
                                        double a_max) {
    check_span(delta_L);
    check_epsilon(epsilon);
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
    if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
    const double cmax = timeopt::chi_exact(delta_L);
    return {delta_L, eta, a_max, epsilon, (1.0 - eta * eta) * cmax, cmax, Sign::plus};
}

FuelOptProblem FuelOptProblem::from_boundary(double delta_L, double dt_f, double a_max,
                                             double epsilon) {
    check_span(delta_L);
    check_epsilon(epsilon);
    if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
    if (dt_f == 0.0 || !std::isfinite(dt_f)) throw DomainError("final time offset must be nonzero");
    const double chi = std::abs(dt_f) / a_max;
    const double cmax = timeopt::chi_exact(delta_L);
    if (!(chi < cmax)) {
        const double min_span =
            timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_chi(chi)).delta_L;
        std::ostringstream os;
        os.precision(17);
        os << "transfer infeasible: delta_L = " << delta_L
           << " is below the time-optimal minimum " << min_span;
        throw InfeasibleError(os.str(), min_span);
    }
    return {delta_L, std::sqrt(1.0 - chi / cmax), a_max, epsilon, chi, cmax,
            dt_f > 0.0 ? Sign::minus : Sign::plus};
}

FuelOptProblem FuelOptProblem::with_epsilon(double eps) const {
    check_epsilon(eps);
    FuelOptProblem p = *this;
    p.epsilon = eps;
    return p;
}

double switching_rho(double L, double l0, double l1) {
    return 1.0 - std::abs(l0) * primer_norm(L, l1);
}

double smoothed_magnitude(double rho, double epsilon, double a_max) {
    check_epsilon(epsilon);
    return a_max * throttle(rho, epsilon).u;
}

double FuelOptSolution::rho_at(double L) const { return switching_rho(L, l0, l1); }

double FuelOptSolution::magnitude_at(double L) const {
    return smoothed_magnitude(rho_at(L), problem.epsilon, problem.a_max);
}

ControlLVLH FuelOptSolution::control_at(double L) const {
    return optimal_control(L, l1, problem.sign_l0, magnitude_at(L));
}

LinCostates FuelOptSolution::costates_at(double L) const {
    return costates_closed_form(L, value(problem.sign_l0) * l0, l1);
}

std::array<double, 2> fuel_residual(double l0, double l1, const FuelOptProblem& problem,
                                    const FuelOptOptions& options) {
    check_l0(l0);
    const auto breaks = half_arc_breaks(l0, l1, problem, options);
    auto f = [&](double L) {
        const auto v = timeopt::integrands(L, l1);
        const double u = throttle(switching_rho(L, l0, l1), problem.epsilon).u;
        return std::array<double, 2>{u * v.f1, u * v.f2};
    };
    const auto r = numerics::quad_adaptive_n<2>(f, 0.0, 0.5 * problem.delta_L, options.quad,
                                                breaks);
    return {2.0 * r[0], 2.0 * r[1] - problem.chi};
}

std::array<double, 4> fuel_jacobian(double l0, double l1, const FuelOptProblem& problem,
                                    const FuelOptOptions& options) {
    check_l0(l0);
    const auto breaks = half_arc_breaks(l0, l1, problem, options);
    auto f = [&](double L) {
        const double s = std::sin(L);
        const double c = std::cos(L);
        const double tr = 3.0 * L - 2.0 * l1 * s;
        const double ra = primer_radial(L, l1);
        const double d = std::hypot(tr, ra);
        const double dd = (-2.0 * s * tr + c * ra) / d;
        const auto v = timeopt::integrands(L, l1);
        // Numerators of the two integrands and their l1 derivatives.
        const double n1 = v.f1 * d, n2 = v.f2 * d;
        const double dn1 = -1.0 - 3.0 * s * s;
        const double dn2 = -6.0 * L * s - 2.0 * c;
        const Throttle th = throttle(1.0 - l0 * d, problem.epsilon);
        const double du_l0 = -th.du_drho * d;
        const double du_l1 = -th.du_drho * l0 * dd;
        const double g1 = (dn1 - v.f1 * dd) / d;
        const double g2 = (dn2 - v.f2 * dd) / d;
        return std::array<double, 4>{du_l0 * n1 / d, du_l1 * v.f1 + th.u * g1,
                                     du_l0 * n2 / d, du_l1 * v.f2 + th.u * g2};
    };
    auto r = numerics::quad_adaptive_n<4>(f, 0.0, 0.5 * problem.delta_L, options.jacobian_quad,
                                          breaks);
    for (auto& x : r) x *= 2.0;
    return r;
}

BurnArcs count_burn_arcs(double l0, double l1, double delta_L, int scan_points) {
    check_span(delta_L);
    if (scan_points < 3) throw DomainError("burn arc scan needs at least 3 points");
    const double a = -0.5 * delta_L;
    const double h = delta_L / (scan_points - 1);
    auto rho = [&](double L) { return switching_rho(L, l0, l1); };
    auto sgn = [](double x) { return x < 0.0 ? -1 : 1; };

    BurnArcs out{0, {}};
    double prev_L = a;
    double prev = rho(a);
    out.profile.signs.push_back(sgn(prev));
    for (int i = 1; i < scan_points; ++i) {
        const double L = i + 1 == scan_points ? -a : a + i * h;
        const double cur = rho(L);
        if (sgn(cur) != sgn(prev)) {
            out.profile.roots.push_back(numerics::bisect(rho, prev_L, L));
            out.profile.signs.push_back(sgn(cur));
        }
        prev = cur;
        prev_L = L;
    }
    for (int s : out.profile.signs) {
        if (s < 0) ++out.n_arcs;
    }
    return out;
}

AnalyticEstimate analytic_fuel_estimate(double delta_L, double eta, Regime regime,
                                        double a_max) {
    check_span(delta_L);
    if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
    const double J = (1.0 - eta) * a_max * delta_L;
    if (regime == Regime::short_term) return {2.0 / (eta * delta_L), 2.0, J};
    return {2.0 / (3.0 * eta * delta_L), timeopt::solve_lambda1(delta_L), J};
}

Seed switch_condition_seed(double delta_L, double eta) {
    check_span(delta_L);
    const double l1 = timeopt::solve_lambda1(delta_L);
    return {1.0 / primer_norm(0.5 * eta * delta_L, l1), l1, SeedSource::analytic};
}

FuelOptSolution solve_fuel_optimal(const FuelOptProblem& problem, const std::vector<Seed>& seeds,
                                   const FuelOptOptions& options) {
    auto F = [&](const Eigen::VectorXd& z) {
        const auto r = fuel_residual(z(0), z(1), problem, options);
        return Eigen::Vector2d(r[0], r[1]).eval();
    };
    auto Jf = [&](const Eigen::VectorXd& z) {
        const auto j = fuel_jacobian(z(0), z(1), problem, options);
        Eigen::MatrixXd m(2, 2);
        m << j[0], j[1], j[2], j[3];
        return m;
    };

    std::vector<std::string> log;
    int attempts = 0;
    auto attempt = [&](const Seed& seed) -> std::optional<FuelOptSolution> {
        ++attempts;
        try {
            const auto r = numerics::hybrid_solve(F, Jf, Eigen::Vector2d(seed.l0, seed.l1),
                                                  options.root);
            const double l0 = r.z(0), l1 = r.z(1);
            FuelOptSolution sol{problem, l0, l1, velocity_integral(l0, l1, problem, options),
                                count_burn_arcs(l0, l1, problem.delta_L, options.scan_points)
                                    .n_arcs,
                                {r.residual(0), r.residual(1)}, r.iterations, attempts,
                                seed.source};
            return sol;
        } catch (const Error& e) {
            log.push_back(describe(seed) + ": " + e.what());
            return std::nullopt;
        }
    };

    for (const Seed& s : seeds) {
        if (auto sol = attempt(s)) return *sol;
    }
    if (options.analytic_seed) {
        if (auto sol = attempt(switch_condition_seed(problem.delta_L, problem.eta))) return *sol;
    }
    std::mt19937_64 rng(options.rng_seed);
    std::uniform_real_distribution<double> draw_l0(0.0, options.l0_range / problem.delta_L);
    std::uniform_real_distribution<double> draw_l1(-options.l1_range, options.l1_range);
    for (int i = 0; i < options.random_attempts; ++i) {
        const double l0 = draw_l0(rng);
        const double l1 = draw_l1(rng);
        if (auto sol = attempt({l0, l1, SeedSource::random})) return *sol;
    }

    std::ostringstream os;
    os << "fuel-optimal shooting failed after " << attempts << " attempts";
    for (const auto& line : log) os << "\n  " << line;
    throw NonconvergenceError(os.str(), {}, {}, attempts);
}

Continuation continue_epsilon(const FuelOptSolution& start, double epsilon_target, double factor,
                              const FuelOptOptions& options, int max_refinements) {
    check_epsilon(epsilon_target);
    if (!(factor > 1.0)) throw DomainError("continuation factor must exceed 1");
    Continuation out{start, {start.epsilon()}};
    FuelOptOptions opt = options;
    opt.random_attempts = 0;
    opt.analytic_seed = false;

    double eps = start.epsilon();
    double step = factor;
    int refinements = 0;
    while (eps > epsilon_target) {
        double next = eps / step;
        // Land exactly on the target instead of a rounding step short of it.
        if (next < epsilon_target * (1.0 + 1e-9)) next = epsilon_target;
        try {
            FuelOptSolution sol = solve_fuel_optimal(
                out.solution.problem.with_epsilon(next),
                {{out.solution.l0, out.solution.l1, SeedSource::continuation}}, opt);
            sol.attempts = out.solution.attempts;
            out.solution = sol;
            out.path.push_back(next);
            eps = next;
            step = factor;
            refinements = 0;
        } catch (const NonconvergenceError& e) {
            if (++refinements > max_refinements) {
                std::ostringstream os;
                os.precision(17);
                os << "epsilon continuation stalled; last converged epsilon " << eps << "\n"
                   << e.what();
                throw NonconvergenceError(os.str(), {out.solution.l0, out.solution.l1}, {},
                                          refinements);
            }
            step = std::sqrt(step);
        }
    }
    return out;
}

}  // namespace rephase::fuelopt
