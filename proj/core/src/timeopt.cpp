#include "rephase/timeopt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rephase/error.hpp"
#include "rephase/numerics/hybrid_solve.hpp"
#include "rephase/numerics/quadrature.hpp"
#include "rephase/numerics/scalar_root.hpp"

namespace rephase::timeopt {

namespace {

void require_positive_span(double delta_L) {
    if (!(delta_L > 0.0) || !std::isfinite(delta_L)) {
        throw DomainError("true longitude span must be positive, got " + std::to_string(delta_L));
    }
}

// Fourier fit coefficients for l1(dL).
constexpr double kSplitL = 10.0;
constexpr std::array<double, 4> kC1 = {-19.34, 22.5, 1.261, -2.419};
constexpr std::array<double, 3> kD1 = {23.9, -14.18, 1.54};
constexpr double kN1 = 0.1699;
constexpr std::array<double, 4> kC2 = {1.302, -0.9269, -0.3164, -0.09964};
constexpr std::array<double, 3> kD2 = {0.02194, 0.01196, 0.005974};
constexpr double kN2 = 0.4999;

// Rational fit coefficients for dL(chi).
constexpr double kP1 = 0.04978, kP2 = 7.48, kP3 = 50.08, kP4 = 6.73;
constexpr double kQ1 = 14.49, kQ2 = 15.94;
constexpr double kChiShort = 0.2;
constexpr double kChiLong = 200.0;
constexpr double kSpanShort = 0.89;
constexpr double kSpanLong = 16.33;

double fourier(double x, const std::array<double, 4>& c, const std::array<double, 3>& d,
               double n) {
    double v = c[0];
    for (int i = 1; i <= 3; ++i) {
        v += c[i] * std::cos(i * n * x) + d[i - 1] * std::sin(i * n * x);
    }
    return v;
}

double default_lambda1_seed(double delta_L) {
    if (delta_L < 1.0) return short_term_alpha(delta_L).l1;
    return approx_lambda1(delta_L);
}

struct Evaluation {
    double delta_L;
    double l1;
    ShootingIntegrals q;
};

}  // namespace

TimeOptProblem TimeOptProblem::from_chi(double chi, double a_max) {
    if (!(chi > 0.0)) throw DomainError("chi must be positive");
    if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
    return {chi, a_max, -chi * a_max};
}

TimeOptProblem TimeOptProblem::from_boundary(double dt_f, double a_max) {
    if (!(a_max > 0.0)) throw DomainError("a_max must be positive");
    if (dt_f == 0.0 || !std::isfinite(dt_f)) {
        throw DomainError("final time offset must be nonzero for a rephasing transfer");
    }
    return {std::abs(dt_f) / a_max, a_max, dt_f};
}

double TimeOptSolution::lambda0_transversality() const {
    return 1.0 / (a_max * primer_norm(0.5 * delta_L, l1));
}

LinCostates TimeOptSolution::costates_at(double L) const {
    return costates_closed_form(L, value(sign_l0), l1);
}

ControlLVLH TimeOptSolution::control_at(double L) const {
    return optimal_control(L, l1, sign_l0, a_max);
}

Integrands integrands(double L, double l1) {
    const double s = std::sin(L);
    const double h = std::sin(0.5 * L);
    const double radial = (l1 - 2.0) - 2.0 * l1 * h * h;
    const double transversal = 3.0 * L - 2.0 * l1 * s;
    const double d = std::hypot(radial, transversal);
    // 2 cos L - l1 and 4 - 2 l1 cos L rewritten around l1 = 2.
    const double n1 = 6.0 * L * s - 4.0 * h * h - (l1 - 2.0) - 3.0 * l1 * s * s;
    const double n2 = 9.0 * L * L - 6.0 * l1 * L * s - 2.0 * (l1 - 2.0) + 4.0 * l1 * h * h;
    const double q = 3.0 * L * std::cos(L) - 4.0 * s;
    return {n1 / d, n2 / d, -q * q / (d * d * d)};
}

ShootingIntegrals shooting_integrals(double delta_L, double l1, const numerics::QuadSettings& quad) {
    require_positive_span(delta_L);
    auto f = [l1](double L) {
        const Integrands v = integrands(L, l1);
        return std::array<double, 3>{v.f1, v.f2, v.df1_dl1};
    };
    const auto r = numerics::quad_adaptive_n<3>(f, 0.0, 0.5 * delta_L, quad);
    return {r[0], 2.0 * r[1], r[2]};
}

double f1(double delta_L, double l1, const numerics::QuadSettings& quad) {
    require_positive_span(delta_L);
    return numerics::quad_adaptive([l1](double L) { return integrands(L, l1).f1; }, 0.0,
                                   0.5 * delta_L, quad);
}

double f2(double delta_L, double l1, const numerics::QuadSettings& quad) {
    require_positive_span(delta_L);
    return 2.0 * numerics::quad_adaptive([l1](double L) { return integrands(L, l1).f2; }, 0.0,
                                         0.5 * delta_L, quad);
}

Partials f1_partials(double delta_L, double l1, const numerics::QuadSettings& quad) {
    require_positive_span(delta_L);
    const double dl1 = numerics::quad_adaptive(
        [l1](double L) { return integrands(L, l1).df1_dl1; }, 0.0, 0.5 * delta_L, quad);
    return {0.5 * integrands(0.5 * delta_L, l1).f1, dl1};
}

Partials f2_partials(double delta_L, double l1, const numerics::QuadSettings& quad) {
    const Partials p1 = f1_partials(delta_L, l1, quad);
    return {integrands(0.5 * delta_L, l1).f2, 2.0 * l1 * p1.d_l1};
}

double solve_lambda1(double delta_L, std::optional<double> seed,
                     const numerics::RootSettings& settings, const numerics::QuadSettings& quad) {
    require_positive_span(delta_L);
    auto fdf = [&](double l1) {
        auto f = [l1](double L) {
            const Integrands v = integrands(L, l1);
            return std::array<double, 2>{v.f1, v.df1_dl1};
        };
        const auto r = numerics::quad_adaptive_n<2>(f, 0.0, 0.5 * delta_L, quad);
        return std::pair{r[0], r[1]};
    };
    const double x0 = seed.value_or(default_lambda1_seed(delta_L));
    return numerics::newton_scalar(fdf, x0, settings).x;
}

double chi_exact(double delta_L, const numerics::QuadSettings& quad) {
    const double l1 = solve_lambda1(delta_L, std::nullopt, {}, quad);
    return shooting_integrals(delta_L, l1, quad).f2;
}

namespace {

TimeOptSolution finish(const TimeOptProblem& p, double delta_L, double l1, int iterations,
                       const ShootingIntegrals& q) {
    TimeOptSolution s{};
    s.delta_L = delta_L;
    s.l1 = l1;
    s.sign_l0 = p.sign_l0();
    s.chi = p.chi;
    s.a_max = p.a_max;
    s.dt_f = p.dt_f;
    s.tof = p.dt_f + delta_L;
    s.iterations = iterations;
    s.residual_f1 = q.f1;
    s.residual_f2 = q.f2 - p.chi;
    return s;
}

TimeOptSolution solve_double_loop(const TimeOptProblem& p, double dL_seed,
                                  const TimeOptOptions& opt) {
    const double scale = std::max(1.0, p.chi);
    // Warm start for the inner l1 solve, extrapolated along dl1/d(dL).
    double last_dL = dL_seed;
    double last_l1 = default_lambda1_seed(dL_seed);
    double last_slope = 0.0;
    Evaluation best{};
    bool have_best = false;

    auto outer = [&](double dL) -> std::pair<double, double> {
        if (!(dL > 0.0)) {
            // Outside the domain chi(dL) - chi is negative and flat.
            return {-p.chi / scale, 1.0};
        }
        const double seed = last_l1 + last_slope * (dL - last_dL);
        double l1;
        try {
            l1 = solve_lambda1(dL, seed, opt.root, opt.quad);
        } catch (const RootFindError&) {
            l1 = solve_lambda1(dL, std::nullopt, opt.root, opt.quad);
        }
        const ShootingIntegrals q = shooting_integrals(dL, l1, opt.quad);
        const Integrands end = integrands(0.5 * dL, l1);
        const double df1_ddL = 0.5 * end.f1;
        const double dl1_ddL = -df1_ddL / q.df1_dl1;
        const double dchi = end.f2 + 2.0 * l1 * q.df1_dl1 * dl1_ddL;
        last_dL = dL;
        last_l1 = l1;
        last_slope = dl1_ddL;
        best = {dL, l1, q};
        have_best = true;
        return {(q.f2 - p.chi) / scale, dchi / scale};
    };
    const auto root = numerics::newton_scalar(outer, dL_seed, opt.root);
    if (!have_best || best.delta_L != root.x) outer(root.x);
    return finish(p, best.delta_L, best.l1, root.iterations, best.q);
}

TimeOptSolution solve_hybrid(const TimeOptProblem& p, double dL_seed, double l1_seed,
                             const TimeOptOptions& opt) {
    // The chi residual stays unscaled in the trust-region model and is
    // converged relative to max(1, chi).
    auto residual = [&](const Eigen::VectorXd& z) {
        const ShootingIntegrals q = shooting_integrals(z(0), z(1), opt.quad);
        Eigen::VectorXd r(2);
        r << q.f1, q.f2 - p.chi;
        return r;
    };
    auto jacobian = [&](const Eigen::VectorXd& z) {
        const double dL = z(0), l1 = z(1);
        const Partials p1 = f1_partials(dL, l1, opt.quad);
        const Integrands end = integrands(0.5 * dL, l1);
        Eigen::MatrixXd j(2, 2);
        j << p1.d_delta_L, p1.d_l1, end.f2, 2.0 * l1 * p1.d_l1;
        return j;
    };
    Eigen::VectorXd z0(2);
    z0 << dL_seed, l1_seed;
    Eigen::VectorXd tol_scale(2);
    tol_scale << 1.0, std::max(1.0, p.chi);
    const auto r = numerics::hybrid_solve(residual, jacobian, z0, opt.root, tol_scale);
    const ShootingIntegrals q = shooting_integrals(r.z(0), r.z(1), opt.quad);
    return finish(p, r.z(0), r.z(1), r.iterations, q);
}

}  // namespace

TimeOptSolution solve_time_optimal(const TimeOptProblem& problem, const TimeOptOptions& options) {
    if (!(problem.chi > 0.0) || !std::isfinite(problem.chi)) {
        throw DomainError("chi must be positive");
    }
    const double base = approx_deltaL(problem.chi);
    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, options.max_attempts); ++attempt) {
        // Reseeding alternates around the fitted span.
        const double factor = attempt == 0 ? 1.0 : 1.0 + 0.05 * attempt * (attempt % 2 ? -1 : 1);
        const double dL_seed = base * factor;
        try {
            if (options.strategy == Strategy::double_loop) {
                return solve_double_loop(problem, dL_seed, options);
            }
            return solve_hybrid(problem, dL_seed, default_lambda1_seed(dL_seed), options);
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    throw NonconvergenceError("solve_time_optimal: all attempts failed at chi = " +
                                  std::to_string(problem.chi) + ": " + last_error,
                              {}, {}, 0);
}

double approx_lambda1(double delta_L) {
    require_positive_span(delta_L);
    if (delta_L <= kSplitL) return fourier(delta_L, kC1, kD1, kN1);
    return fourier(delta_L, kC2, kD2, kN2);
}

double approx_deltaL(double chi) {
    if (!(chi > 0.0)) throw DomainError("chi must be positive");
    if (chi <= kChiShort) return short_term_delta_L(chi);
    if (chi <= kChiLong) {
        const double num = ((kP1 * chi + kP2) * chi + kP3) * chi + kP4;
        const double den = (chi + kQ1) * chi + kQ2;
        return num / den;
    }
    return long_term_delta_L(chi);
}

double chi_max(double delta_L) {
    require_positive_span(delta_L);
    if (delta_L <= kSpanShort) return 0.25 * delta_L * delta_L;
    if (delta_L > kSpanLong) return 0.75 * delta_L * delta_L;
    auto cubic = [delta_L](double chi) {
        return ((kP1 * chi + (kP2 - delta_L)) * chi + (kP3 - kQ1 * delta_L)) * chi +
               (kP4 - kQ2 * delta_L);
    };
    // Positive at large chi, negative at zero for dL > kP4 / kQ2.
    double hi = 1.0;
    while (cubic(hi) <= 0.0) hi *= 2.0;
    return numerics::bisect(cubic, 0.0, hi, 0.0);
}

ShortTermSolution short_term_alpha(double delta_L) {
    if (!(delta_L > 0.0) || !(delta_L < 4.0)) {
        throw DomainError("short-term approximation needs 0 < dL < 4");
    }
    const double k = 4.0 / delta_L;
    // sinh(y)/y rises from 1 to infinity on y > 0.
    auto g = [k](double y) { return std::sinh(y) / y - k; };
    double hi = 1.0;
    while (g(hi) < 0.0) hi *= 2.0;
    const double y = numerics::bisect(g, 1e-300, hi, 0.0);
    const double alpha = delta_L * delta_L / (8.0 * y);
    return {alpha, y, 2.0 - alpha};
}

}  // namespace rephase::timeopt
