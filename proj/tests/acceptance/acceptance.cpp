// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "rephase/atlas.hpp"
#include "rephase/error.hpp"
#include "rephase/fuelopt.hpp"
#include "rephase/nonlinear.hpp"
#include "rephase/timeopt.hpp"

using namespace rephase;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool rel_ok(double v, double ref, double tol) { return std::abs(v - ref) <= tol * std::abs(ref); }

double central(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

bool fd_ok(double analytic, double fd, double tol, double floor) {
    return std::abs(analytic - fd) <= tol * std::max({std::abs(analytic), std::abs(fd), floor});
}

struct TimeRef {
    const char* id;
    double dt_f, a_max, lin_dL;
    double lin_lx[3];
    double nl_dL;
    double nl_lx[3];
};

const TimeRef kTimeRefs[] = {
    {"1", -0.005, 0.1, 0.44866, {0.33650, -0.44491, 0.04464}, 0.45366, {0.33160, -0.43755, 0.04477}},
    {"S1", -0.01, 0.001, 5.00627, {3.75470, -1.19191, 3.70636}, 5.01167, {3.74128, -1.17964, 3.69340}},
    {"S2", -0.1, 0.01, 5.00627, {3.75470, -1.19191, 3.70636}, 5.06025, {3.62345, -1.07286, 3.57886}},
    {"S3", -1.0, 0.1, 5.00627, {3.75470, -1.19191, 3.70636}, 5.55308, {2.68055, -0.28892, 2.61255}},
    {"3", -1.0, 0.001, 36.40864, {27.30648, 1.20278, -1.06349}, 37.19677, {26.18922, 0.48488, -2.17276}},
};

Outcome time_linear() {
    Outcome o;
    const double tol_dL[] = {5e-4, 5e-4, 5e-4, 5e-4, 5e-3};
    for (int k = 0; k < 5; ++k) {
        const auto& r = kTimeRefs[k];
        const auto s = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(r.dt_f, r.a_max));
        o.require(std::abs(s.delta_L - r.lin_dL) <= tol_dL[k],
                  std::string(r.id) + fmt(" dL %.6f", s.delta_L));
        const auto m = nonlinear::map_linear_costates(s);
        for (int i = 0; i < 3; ++i) {
            o.require(std::abs(m.costates.lx[i] - r.lin_lx[i]) <= 1e-4,
                      std::string(r.id) + fmt(" lx[%g] %.6f", i, m.costates.lx[i]));
        }
    }
    if (o.pass) o.detail = "dL and lx of chi = 0.05, 10, 1000";
    return o;
}

Outcome time_nonlinear() {
    Outcome o;
    double gap_s1 = 0.0, gap_s3 = 0.0;
    for (const auto& r : kTimeRefs) {
        const auto lin = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(r.dt_f, r.a_max));
        const auto s = nonlinear::solve_nonlinear(nonlinear::NonlinProblem::time(r.dt_f, r.a_max),
                                                  nonlinear::map_linear_costates(lin));
        o.require(rel_ok(s.delta_L, r.nl_dL, 1e-3), std::string(r.id) + fmt(" dL %.6f", s.delta_L));
        for (int i = 0; i < 3; ++i) {
            o.require(std::abs(s.costates.lx[i] - r.nl_lx[i]) <= 1e-3,
                      std::string(r.id) + fmt(" lx[%g] %.6f", i, s.costates.lx[i]));
        }
        const double gap = (s.delta_L - lin.delta_L) / s.delta_L;
        if (std::string(r.id) == "S1") gap_s1 = gap;
        if (std::string(r.id) == "S3") gap_s3 = gap;
    }
    o.require(std::abs(gap_s3 - 0.098) <= 0.005, fmt("S3 gap %.4f", gap_s3));
    o.require(std::abs(gap_s1) <= 0.002, fmt("S1 gap %.4f", gap_s1));
    if (o.pass) o.detail = fmt("5 rows; dL gap S1 %.2f%%, S3 %.2f%%", 100 * gap_s1, 100 * gap_s3);
    return o;
}

Outcome fuel_refs() {
    Outcome o;
    const struct {
        double dL, dt_f, lt, J_lin, J_opt;
        int arcs_a, arcs_b;
    } cases[] = {{0.5, -5.21e-5, 10.20851, 0.61117, 0.61131, 2, 2},
                 {8.0, -2.73e-2, 0.10688, 0.36119, 0.36233, 2, 4},
                 {50.0, -0.677, 0.01574, 0.20261, 0.20481, 4, 4}};
    std::string arcs;
    for (const auto& c : cases) {
        const auto lin = fuelopt::solve_fuel_optimal(
            fuelopt::FuelOptProblem::from_boundary(c.dL, c.dt_f, 0.001, 0.01));
        const auto m = nonlinear::map_linear_costates(lin);
        o.require(rel_ok(m.costates.lt, c.lt, 1e-3), fmt("dL %g lt %.6f", c.dL, m.costates.lt));
        o.require(rel_ok(lin.J_norm(), c.J_lin, 1e-3), fmt("dL %g J %.6f", c.dL, lin.J_norm()));
        const auto nl = nonlinear::solve_nonlinear(
            nonlinear::NonlinProblem::fuel(c.dL, c.dt_f, 0.001, 0.01), m);
        const auto opt = nonlinear::continue_epsilon(nl, 1e-6).solution;
        o.require(rel_ok(opt.J_norm(), c.J_opt, 1e-3), fmt("dL %g optimal J %.6f", c.dL, opt.J_norm()));
        const int n = nonlinear::count_burn_arcs(opt);
        o.require(n == c.arcs_a || n == c.arcs_b, fmt("dL %g arcs %g", c.dL, n));
        arcs += (arcs.empty() ? "" : ", ") + std::to_string(n);
    }
    if (o.pass) o.detail = "lt, J, optimal J at eps 1e-6; arcs " + arcs;
    return o;
}

Outcome fit_quality() {
    Outcome o;
    const double lo = std::log(timeopt::chi_exact(0.0125)), hi = std::log(timeopt::chi_exact(125.0));
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(lo, hi);
    double worst = 0.0, at = 0.0, at_chi = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double chi = std::exp(u(rng));
        const double exact = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_chi(chi)).delta_L;
        const double err = std::abs(timeopt::approx_deltaL(chi) - exact) / exact;
        if (err > worst) {
            worst = err;
            at = exact;
            at_chi = chi;
        }
    }
    // The fitted coefficients are fixed; the 2 sqrt(chi/3) branch undershoots just past chi = 200.
    o.require(worst <= 0.012, fmt("max rel error %.4f at dL %.3f", worst, at) + fmt(" (chi %.1f)", at_chi));
    if (o.pass) o.detail = fmt("max rel error %.5f at dL %.3f over 1000 chi", worst, at);
    return o;
}

Outcome convergence() {
    Outcome o;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(std::log(1e-5), std::log(1.2e4));
    int ok_dl = 0, ok_h = 0, max_h = 0;
    double sum_h = 0.0;
    const int n = 1000;
    for (int k = 0; k < n; ++k) {
        const auto p = timeopt::TimeOptProblem::from_chi(std::exp(u(rng)));
        timeopt::TimeOptOptions dl, hy;
        dl.max_attempts = 1;
        hy.max_attempts = 1;
        hy.strategy = timeopt::Strategy::hybrid2d;
        try {
            timeopt::solve_time_optimal(p, dl);
            ++ok_dl;
        } catch (const Error&) {
        }
        try {
            const auto s = timeopt::solve_time_optimal(p, hy);
            ++ok_h;
            max_h = std::max(max_h, s.iterations);
            sum_h += s.iterations;
        } catch (const Error&) {
        }
    }
    const double mean = ok_h ? sum_h / ok_h : 0.0;
    o.require(ok_dl == n, fmt("double loop %g/1000", ok_dl));
    o.require(ok_h == n, fmt("hybrid2d %g/1000", ok_h));
    o.require(max_h <= 12 && mean <= 7.0, fmt("hybrid2d iterations max %g mean %.2f", max_h, mean));
    o.detail = fmt("double loop %g/1000, hybrid2d %g/1000", ok_dl, ok_h) +
               fmt(", hybrid2d iterations max %g mean %.2f", max_h, mean);
    return o;
}

Outcome jacobians() {
    Outcome o;
    std::mt19937_64 rng(303);
    int bad_time = 0, bad_fuel = 0, bad_nl = 0;

    std::uniform_real_distribution<double> logdl(std::log(0.05), std::log(100.0)), ul1(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double dL = std::exp(logdl(rng)), l1 = ul1(rng);
        const auto p1 = timeopt::f1_partials(dL, l1);
        const auto p2 = timeopt::f2_partials(dL, l1);
        const double h = 1e-5, hd = h * dL;
        auto f1 = [&](double a, double b) { return timeopt::f1(a, b); };
        auto f2 = [&](double a, double b) { return timeopt::f2(a, b); };
        const bool ok =
            fd_ok(p1.d_delta_L, central([&](double x) { return f1(x, l1); }, dL, hd), 1e-6, 1e-3) &&
            fd_ok(p1.d_l1, central([&](double x) { return f1(dL, x); }, l1, h), 1e-6, 1e-3) &&
            fd_ok(p2.d_delta_L, central([&](double x) { return f2(x, l1); }, dL, hd), 1e-6, 1e-3) &&
            fd_ok(p2.d_l1, central([&](double x) { return f2(dL, x); }, l1, h), 1e-6, 1e-3);
        if (!ok) ++bad_time;
    }

    std::uniform_real_distribution<double> udl(0.3, 60.0), ueta(0.3, 0.9), ueps(0.02, 0.2);
    std::uniform_real_distribution<double> scale(0.8, 1.2), shift(-0.3, 0.3);
    for (int k = 0; k < 100; ++k) {
        const auto p = fuelopt::FuelOptProblem::from_eta(udl(rng), ueta(rng), ueps(rng));
        const auto seed = fuelopt::switch_condition_seed(p.delta_L, p.eta);
        const double l0 = seed.l0 * scale(rng), l1 = seed.l1 + shift(rng);
        const auto jac = fuelopt::fuel_jacobian(l0, l1, p);
        const double h0 = 1e-5 * l0, h1 = 1e-5;
        auto r = [&](double a, double b) { return fuelopt::fuel_residual(a, b, p); };
        const auto a = r(l0 + h0, l1), b = r(l0 - h0, l1), c = r(l0, l1 + h1), d = r(l0, l1 - h1);
        const double fd[4] = {(a[0] - b[0]) / (2 * h0), (c[0] - d[0]) / (2 * h1),
                              (a[1] - b[1]) / (2 * h0), (c[1] - d[1]) / (2 * h1)};
        bool ok = true;
        for (int i = 0; i < 4; ++i) {
            const double row = std::max(std::abs(jac[i / 2 * 2]), std::abs(jac[i / 2 * 2 + 1]));
            if (std::abs(jac[i] - fd[i]) > 1e-6 * row) ok = false;
        }
        if (!ok) ++bad_fuel;
    }

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const nonlinear::EquinoctialState s{1.0 + 0.3 * u(rng), 0.2 * u(rng), 0.2 * u(rng),
                                            4.0 * u(rng), u(rng)};
        const nonlinear::NonlinCostates cs{{3.0 * u(rng), 3.0 * u(rng), 3.0 * u(rng)}, u(rng)};
        const ControlLVLH a{0.01 * u(rng), 0.01 * u(rng)};
        const auto kind = k % 2 ? nonlinear::PhiKind::fuel : nonlinear::PhiKind::time;
        const auto got = nonlinear::costate_rhs(s, cs, a, kind);
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
            auto H = [&](double x) {
                auto t = s;
                (j == 0 ? t.p : j == 1 ? t.f : t.g) = x;
                const auto r = nonlinear::equinoctial_rhs(t, a);
                const double phi = kind == nonlinear::PhiKind::time ? 1.0 : a.magnitude();
                return cs.lx[0] * r.dp + cs.lx[1] * r.df + cs.lx[2] * r.dg + (cs.lt + phi) * r.dt;
            };
            const double x0 = j == 0 ? s.p : j == 1 ? s.f : s.g;
            if (!fd_ok(got[j], -central(H, x0, 1e-5), 1e-6, 1e-4)) ok = false;
        }
        if (!ok) ++bad_nl;
    }
    o.require(bad_time == 0, fmt("time partials: %g of 100 points off", bad_time));
    o.require(bad_fuel == 0, fmt("fuel Jacobian: %g of 100 points off", bad_fuel));
    o.require(bad_nl == 0, fmt("costate partials: %g of 100 points off", bad_nl));
    if (o.pass) o.detail = "time partials, fuel Jacobian, costate partials at 100 points each";
    return o;
}

Outcome asymptotics() {
    Outcome o;
    const struct {
        double dL, eta, l0_estimate;
    } cases[] = {{0.25, 0.5, 2.0 / (0.5 * 0.25)}, {100.0, 0.5, 2.0 / (3.0 * 0.5 * 100.0)}};
    for (const auto& c : cases) {
        const auto s0 = fuelopt::solve_fuel_optimal(fuelopt::FuelOptProblem::from_eta(c.dL, c.eta, 0.01));
        const auto s = fuelopt::continue_epsilon(s0, 1e-4).solution;
        const double jerr = std::abs(s.J_norm() - (1.0 - c.eta)) / (1.0 - c.eta);
        const double lerr = std::abs(s.l0 - c.l0_estimate) / c.l0_estimate;
        o.require(jerr <= 0.02, fmt("dL %g J_norm %.4f", c.dL, s.J_norm()));
        o.require(lerr <= 0.08, fmt("dL %g l0 %.5f vs %.5f", c.dL, s.l0, c.l0_estimate));
        o.detail += fmt("dL %g: J err %.2f%%, l0 err %.2f%%; ", c.dL, 100 * jerr, 100 * lerr);
    }
    return o;
}

void check_linear_solution(Outcome& o, const ControlLaw& u, double dL, double dt_f, double a_max,
                           std::span<const double> breaks, const std::string& tag) {
    for (int k = 0; k <= 40; ++k) {
        const double L = 0.5 * dL * k / 40.0;
        const auto p = u(L), m = u(-L);
        if (std::abs(p.a_r - m.a_r) > 1e-9 * a_max || std::abs(p.a_th + m.a_th) > 1e-9 * a_max) {
            o.require(false, tag + " asymmetric control");
            return;
        }
    }
    const auto sol = propagate_linear(u, dL, {}, breaks);
    const auto y = sol.final_state();
    o.require(std::abs(y[kDp]) <= 1e-9 && std::abs(y[kDf]) <= 1e-9, tag + " p/f not returned");
    o.require(std::abs(y[kDt] - y[kDtReduced]) <= 1e-9 * std::max(1.0, std::abs(y[kDt])),
              tag + " reduced dt mismatch");
    o.require(std::abs(y[kDt] - dt_f) <= 1e-9 * std::max(1.0, std::abs(dt_f)), tag + " dt_f missed");
}

Outcome properties() {
    Outcome o;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> logchi(std::log(1e-5), std::log(1.2e4));
    int n = 0;
    for (int k = 0; k < 100; ++k) {
        const double chi = std::exp(logchi(rng));
        const double dt_f = (k % 2 ? -1.0 : 1.0) * chi * 0.01;
        const auto s = timeopt::solve_time_optimal(timeopt::TimeOptProblem::from_boundary(dt_f, 0.01));
        check_linear_solution(o, [&](double L) { return s.control_at(L); }, s.delta_L, dt_f, 0.01, {},
                              fmt("time chi %.4g", chi));
        ++n;
    }
    std::uniform_real_distribution<double> udl(0.3, 60.0), ueta(0.3, 0.9);
    for (int k = 0; k < 30; ++k) {
        const auto s = fuelopt::solve_fuel_optimal(
            fuelopt::FuelOptProblem::from_eta(udl(rng), ueta(rng), k % 2 ? 0.1 : 0.01, 0.01));
        const auto arcs = fuelopt::count_burn_arcs(s.l0, s.l1, s.problem.delta_L);
        check_linear_solution(o, [&](double L) { return s.control_at(L); }, s.problem.delta_L,
                              s.problem.dt_f(), 0.01, arcs.profile.roots,
                              fmt("fuel dL %.4g eta %.3g", s.problem.delta_L, s.problem.eta));
        ++n;
    }

    // lt is held fixed; the dynamics must not depend on t for that to hold.
    double drift = 0.0;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        nonlinear::EquinoctialState s{1.0 + 0.2 * u(rng), 0.1 * u(rng), 0.1 * u(rng), 3.0 * u(rng), u(rng)};
        const nonlinear::NonlinCostates cs{{u(rng), u(rng), u(rng)}, u(rng)};
        const ControlLVLH a{1e-3 * u(rng), 1e-3 * u(rng)};
        auto H = [&](double t) {
            s.t = t;
            const auto r = nonlinear::equinoctial_rhs(s, a);
            return cs.lx[0] * r.dp + cs.lx[1] * r.df + cs.lx[2] * r.dg + (cs.lt + a.magnitude()) * r.dt;
        };
        drift = std::max(drift, std::abs(central(H, s.t, 1e-3)) * 60.0);
    }
    o.require(drift <= 1e-10, fmt("lt drift bound %.3g", drift));
    if (o.pass) o.detail = fmt("%g linear solutions; lt drift bound %.1g", n, drift);
    return o;
}

Outcome desk_atlas() {
    Outcome o;
    atlas::FuelAtlasOptions opt;
    opt.epsilon = 0.1;
    opt.jobs = 0;
    const auto g = atlas::generate_fuel_atlas(atlas::linspace(0.5, 50.0, 100),
                                              atlas::linspace(0.30, 0.90, 61), opt);
    const double conv = g.converged_fraction(), mono = g.monotone_fraction();
    o.require(conv >= 0.99, fmt("converged %.4f", conv));
    o.require(mono >= 0.99, fmt("monotone %.4f", mono));
    o.detail = fmt("100x61 at eps 0.1: converged %.2f%%, monotone columns %.2f%%", 100 * conv, 100 * mono);
    return o;
}

}  // namespace

int main() {
    const struct {
        const char* name;
        Outcome (*run)();
    } criteria[] = {
        {"linear time-optimal reference cases", time_linear},
        {"nonlinear time-optimal reference cases", time_nonlinear},
        {"fuel-optimal reference cases", fuel_refs},
        {"dL(chi) fit quality", fit_quality},
        {"convergence from the approximation", convergence},
        {"analytic partials vs central differences", jacobians},
        {"asymptotic fuel consistency", asymptotics},
        {"property suite", properties},
        {"desk-scale fuel atlas", desk_atlas},
    };
    int failures = 0;
    for (std::size_t k = 0; k < std::size(criteria); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s %zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name,
                    o.detail.c_str(), sec);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
