#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <span>

#include "json_writer.hpp"
#include "rephase/atlas.hpp"
#include "rephase/cli.hpp"
#include "rephase/fuelopt.hpp"
#include "rephase/nonlinear.hpp"
#include "rephase/timeopt.hpp"

namespace rephase::cli {

namespace {

// Residuals are re-evaluated from scratch before a solution is reported.
constexpr double kVerifyTol = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Json header(const char* command, const Context& ctx) {
    Json j;
    j["command"] = command;
    j["version"] = REPHASE_VERSION;
    j["rng_seed"] = ctx.rng_seed;
    return j;
}

Json quad_json(const numerics::QuadSettings& q) {
    return {{"tol", q.tol}, {"max_intervals", q.max_intervals}};
}

Json root_json(const numerics::RootSettings& r) {
    return {{"residual_tol", r.residual_tol},
            {"max_iters", r.max_iters},
            {"initial_trust_factor", r.initial_trust_factor}};
}

Json integrator_json(const numerics::IntegratorSettings& s) {
    return {{"rel_tol", s.rel_tol}, {"abs_tol", s.abs_tol}, {"max_steps", s.max_steps}};
}

template <std::size_t N>
Json array_json(const std::array<double, N>& a) {
    Json j = Json::array();
    for (double x : a) j.push_back(x);
    return j;
}

/// Throws NonconvergenceError unless every |r_i| <= kVerifyTol * scale_i.
template <std::size_t N>
void verify(const char* what, const std::array<double, N>& r, const std::array<double, N>& scale) {
    for (std::size_t i = 0; i < N; ++i) {
        if (!(std::abs(r[i]) <= kVerifyTol * scale[i])) {
            throw NonconvergenceError(std::string(what) + ": residual re-verification failed",
                                      {}, {r.begin(), r.end()}, 0);
        }
    }
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path);
    os.precision(17);
    return os;
}

void write_control(std::ostream& os, const ControlLVLH& a) {
    const double gamma_deg = a.magnitude() > 0.0 ? a.gamma() * 180.0 / std::numbers::pi : 0.0;
    os << ',' << a.a_r << ',' << a.a_th << ',' << gamma_deg;
}

// Linear profile: control and state deviations sampled on an even grid.
void write_linear_profile(const std::string& path, const ControlLaw& control, double delta_L,
                          int samples, std::span<const double> breaks,
                          const std::function<double(double)>* rho) {
    const auto traj = propagate_linear(control, delta_L, {}, breaks);
    auto os = open_csv(path);
    os << "L,a_r,a_th,gamma_deg,dp,df,dg,dt" << (rho ? ",rho" : "") << '\n';
    for (int i = 0; i < samples; ++i) {
        const double L = -0.5 * delta_L + delta_L * i / (samples - 1);
        const auto y = traj(L);
        os << L;
        write_control(os, control(L));
        os << ',' << y[kDp] << ',' << y[kDf] << ',' << y[kDg] << ',' << y[kDt];
        if (rho) os << ',' << (*rho)(L);
        os << '\n';
    }
}

// Nonlinear profile: deviations from the nominal orbit, dt = t - (L - L0).
void write_nonlinear_profile(const std::string& path, const nonlinear::NonlinSolution& s,
                             int samples) {
    const auto traj = nonlinear::propagate_nonlinear(s.arc(), s.costates,
                                                     nonlinear::NonlinOptions{}.integrator);
    auto os = open_csv(path);
    os << "L,a_r,a_th,gamma_deg,dp,df,dg,dt,rho\n";
    for (int i = 0; i < samples; ++i) {
        const double L = s.L0() + s.delta_L * i / (samples - 1);
        const auto y = traj(L);
        const nonlinear::EquinoctialState st{y[nonlinear::kP], y[nonlinear::kF],
                                             y[nonlinear::kG], L, y[nonlinear::kT]};
        const nonlinear::NonlinCostates cs{
            {y[nonlinear::kLp], y[nonlinear::kLf], y[nonlinear::kLg]}, s.costates.lt};
        const auto a = nonlinear::nonlinear_control(st, cs, s.kind, s.a_max, s.epsilon);
        const auto v = nonlinear::primer(st, cs.lx);
        os << L;
        write_control(os, a);
        os << ',' << st.p - 1.0 << ',' << st.f << ',' << st.g << ',' << st.t - (L - s.L0()) << ','
           << 1.0 - std::hypot(v[0], v[1]) << '\n';
    }
}

void check_samples(int samples) {
    if (samples < 2) throw UsageError("--samples must be at least 2");
}

Json nonlinear_json(const nonlinear::NonlinSolution& s) {
    Json j;
    j["delta_L"] = s.delta_L;
    j["lx_L0"] = array_json(s.costates.lx);
    j["lt"] = s.costates.lt;
    j["tof"] = s.tof;
    j["J"] = s.J;
    j["J_norm"] = s.J_norm();
    j["epsilon"] = s.epsilon;
    j["iterations"] = s.iterations;
    j["residual"] = array_json(s.residual);
    j["residual_history"] = s.residual_history;
    return j;
}

void verify_nonlinear(const nonlinear::NonlinProblem& problem,
                      const nonlinear::NonlinSolution& s) {
    const auto r = nonlinear::shooting_residual(problem, {s.costates, s.delta_L});
    verify("nonlinear", r, {1.0, 1.0, 1.0, std::max(1.0, s.tof)});
}

}  // namespace

int time_solve(const TimeSolveArgs& args, Context& ctx) {
    const auto t0 = Clock::now();
    check_samples(args.samples);
    if (args.chi.has_value() == args.dt_f.has_value()) {
        throw UsageError("give exactly one of --chi or --dtf");
    }
    timeopt::TimeOptProblem problem{};
    if (args.chi) {
        if (!(*args.chi > 0.0)) throw UsageError("--chi must be positive");
        const double a_max = args.a_max.value_or(1.0);
        if (!(a_max > 0.0)) throw UsageError("--amax must be positive");
        problem = timeopt::TimeOptProblem::from_chi(*args.chi, a_max);
    } else {
        if (!args.a_max) throw UsageError("--dtf requires --amax");
        if (!(*args.a_max > 0.0)) throw UsageError("--amax must be positive");
        if (*args.dt_f == 0.0) throw UsageError("--dtf must be nonzero");
        problem = timeopt::TimeOptProblem::from_boundary(*args.dt_f, *args.a_max);
    }
    timeopt::TimeOptOptions options;
    if (args.strategy == "double-loop") {
        options.strategy = timeopt::Strategy::double_loop;
    } else if (args.strategy == "hybrid2d") {
        options.strategy = timeopt::Strategy::hybrid2d;
    } else {
        throw UsageError("unknown strategy '" + args.strategy + "'");
    }

    const auto sol = timeopt::solve_time_optimal(problem, options);
    const auto sh = timeopt::shooting_integrals(sol.delta_L, sol.l1, options.quad);
    verify("time-solve", std::array<double, 2>{sh.f1, sh.f2 - sol.chi},
           {1.0, std::max(1.0, sol.chi)});

    Json j = header("time-solve", ctx);
    j["settings"] = {{"strategy", args.strategy},
                     {"root", root_json(options.root)},
                     {"quad", quad_json(options.quad)},
                     {"max_attempts", options.max_attempts}};
    j["problem"] = {{"chi", problem.chi}, {"dt_f", problem.dt_f}, {"a_max", problem.a_max}};
    j["solver"] = {{"seed_source", "approximation"},
                   {"iterations", sol.iterations},
                   {"residual", {sol.residual_f1, sol.residual_f2}}};
    const auto c0 = sol.costates_at(-0.5 * sol.delta_L);
    j["solution"] = {{"delta_L", sol.delta_L},
                     {"l1", sol.l1},
                     {"sign_l0", static_cast<int>(sol.sign_l0)},
                     {"chi", sol.chi},
                     {"tof", sol.tof},
                     {"lambda0", value(sol.sign_l0) * sol.lambda0_transversality()},
                     {"lx_L0", {c0.l_dp, c0.l_df, c0.l_dg}}};
    if (!args.profile.empty()) {
        write_linear_profile(args.profile, [&](double L) { return sol.control_at(L); },
                             sol.delta_L, args.samples, {}, nullptr);
        j["profile"] = args.profile;
    }
    j["timing_s"] = seconds_since(t0);
    write_json(ctx.out, j);
    return kExitOk;
}

int fuel_solve(const FuelSolveArgs& args, Context& ctx) {
    const auto t0 = Clock::now();
    check_samples(args.samples);
    if (!args.delta_L) throw UsageError("--dL is required");
    if (!(*args.delta_L > 0.0)) throw UsageError("--dL must be positive");
    if (args.eta.has_value() == args.dt_f.has_value()) {
        throw UsageError("give exactly one of --eta or --dtf");
    }
    if (!(args.epsilon > 0.0)) throw UsageError("--eps must be positive");
    if (args.continue_to && !(*args.continue_to > 0.0 && *args.continue_to < args.epsilon)) {
        throw UsageError("--continue-to must lie in (0, --eps)");
    }
    if (args.a_max && !(*args.a_max > 0.0)) throw UsageError("--amax must be positive");
    if (args.nonlinear && !args.a_max) throw UsageError("--nonlinear requires --amax");

    fuelopt::FuelOptProblem problem{};
    if (args.eta) {
        if (!(*args.eta > 0.0 && *args.eta < 1.0)) throw UsageError("--eta must lie in (0, 1)");
        problem = fuelopt::FuelOptProblem::from_eta(*args.delta_L, *args.eta, args.epsilon,
                                                    args.a_max.value_or(1.0));
    } else {
        if (!args.a_max) throw UsageError("--dtf requires --amax");
        problem = fuelopt::FuelOptProblem::from_boundary(*args.delta_L, *args.dt_f, *args.a_max,
                                                         args.epsilon);
    }

    fuelopt::FuelOptOptions options;
    options.rng_seed = ctx.rng_seed;
    Json candidates = Json::array();
    std::vector<fuelopt::Seed> seeds;
    if (!args.atlas.empty()) {
        const auto grid = atlas::read_atlas(args.atlas);
        const auto cands = atlas::interpolate_seed(grid, problem.delta_L, problem.eta);
        for (const auto& c : cands) {
            candidates.push_back({{"source", atlas::to_string(c.source)},
                                  {"l0", c.l0},
                                  {"l1", c.l1},
                                  {"J_norm", c.J_norm}});
        }
        seeds = atlas::to_seeds(cands);
    }

    auto sol = fuelopt::solve_fuel_optimal(problem, seeds, options);
    std::vector<double> path{sol.epsilon()};
    if (args.continue_to && !args.nonlinear) {
        const auto cont = fuelopt::continue_epsilon(sol, *args.continue_to, 10.0, options);
        sol = cont.solution;
        path = cont.path;
    }
    const auto r = fuelopt::fuel_residual(sol.l0, sol.l1, sol.problem, options);
    verify("fuel-solve", r, {1.0, std::max(1.0, sol.problem.chi)});
    const auto arcs = fuelopt::count_burn_arcs(sol.l0, sol.l1, sol.problem.delta_L,
                                               options.scan_points);

    Json j = header("fuel-solve", ctx);
    j["settings"] = {{"root", root_json(options.root)},
                     {"quad", quad_json(options.quad)},
                     {"jacobian_quad", quad_json(options.jacobian_quad)},
                     {"random_attempts", options.random_attempts},
                     {"scan_points", options.scan_points},
                     {"continuation_factor", 10.0}};
    j["problem"] = {{"delta_L", problem.delta_L}, {"eta", problem.eta},
                    {"chi", problem.chi},         {"chi_max", problem.chi_max},
                    {"a_max", problem.a_max},     {"dt_f", problem.dt_f()},
                    {"epsilon", problem.epsilon}};
    j["solver"] = {{"seed_source", fuelopt::to_string(sol.seed_source)},
                   {"attempts", sol.attempts},
                   {"iterations", sol.iterations},
                   {"residual", array_json(sol.residual)}};
    if (!args.atlas.empty()) {
        j["solver"]["atlas"] = args.atlas;
        j["solver"]["atlas_candidates"] = candidates;
    }
    const auto c0 = sol.costates_at(-0.5 * sol.problem.delta_L);
    j["solution"] = {{"l0", sol.l0},
                     {"lambda0", value(sol.problem.sign_l0) * sol.l0},
                     {"l1", sol.l1},
                     {"J", sol.J},
                     {"J_norm", sol.J_norm()},
                     {"n_arcs", arcs.n_arcs},
                     {"switching_L", arcs.profile.roots},
                     {"epsilon", sol.epsilon()},
                     {"lx_L0", {c0.l_dp, c0.l_df, c0.l_dg}}};
    j["epsilon_path"] = path;

    std::optional<nonlinear::NonlinSolution> nl;
    if (args.nonlinear) {
        const nonlinear::NonlinOptions nopt;
        const auto nproblem = nonlinear::NonlinProblem::fuel(
            problem.delta_L, problem.dt_f(), problem.a_max, problem.epsilon);
        nl = nonlinear::solve_nonlinear(nproblem, nonlinear::map_linear_costates(sol), nopt);
        std::vector<double> npath{nl->epsilon};
        if (args.continue_to) {
            auto cont = nonlinear::continue_epsilon(*nl, *args.continue_to, 10.0, nopt);
            nl = cont.solution;
            npath = cont.path;
        }
        verify_nonlinear(nonlinear::NonlinProblem::fuel(nl->delta_L, nl->dt_f, nl->a_max,
                                                        nl->epsilon),
                         *nl);
        Json nj = nonlinear_json(*nl);
        nj["n_arcs"] = nonlinear::count_burn_arcs(*nl);
        nj["epsilon_path"] = npath;
        j["settings"]["nonlinear"] = {{"integrator", integrator_json(nopt.integrator)},
                                      {"root", root_json(nopt.root)}};
        j["nonlinear"] = nj;
    }

    if (!args.profile.empty()) {
        if (nl) {
            write_nonlinear_profile(args.profile, *nl, args.samples);
        } else {
            const std::function<double(double)> rho = [&](double L) { return sol.rho_at(L); };
            write_linear_profile(args.profile, [&](double L) { return sol.control_at(L); },
                                 sol.problem.delta_L, args.samples, arcs.profile.roots, &rho);
        }
        j["profile"] = args.profile;
    }
    j["timing_s"] = seconds_since(t0);
    write_json(ctx.out, j);
    return kExitOk;
}

int atlas_gen(const AtlasGenArgs& args, Context& ctx) {
    const auto t0 = Clock::now();
    if (args.out.empty()) throw UsageError("--out is required");
    Json j = header("atlas-gen", ctx);
    j["kind"] = args.kind;
    j["out"] = args.out;
    if (args.kind == "time") {
        const double first = args.dL_min > 0.0 ? args.dL_min : 0.0125;
        const double last = args.dL_max > 0.0 ? args.dL_max : 12.5;
        if (!(args.dL_step > 0.0) || !(last >= first)) throw UsageError("invalid dL range");
        const auto curve = atlas::generate_time_atlas(first, last, args.dL_step);
        atlas::write_time_curve(curve, args.out);
        std::size_t converged = 0;
        bool increasing = true;
        for (std::size_t k = 0; k < curve.size(); ++k) {
            if (curve[k].converged) ++converged;
            if (k && !(curve[k].chi > curve[k - 1].chi)) increasing = false;
        }
        j["grid"] = {{"dL_first", first}, {"dL_last", last}, {"dL_step", args.dL_step}};
        j["points"] = curve.size();
        j["converged"] = converged;
        j["chi_strictly_increasing"] = increasing;
    } else if (args.kind == "fuel") {
        const double first = args.dL_min > 0.0 ? args.dL_min : 0.5;
        const double last = args.dL_max > 0.0 ? args.dL_max : 50.0;
        if (!(last > first) || args.dL_count < 2) throw UsageError("invalid dL grid");
        if (!(args.eta_min > 0.0 && args.eta_max < 1.0 && args.eta_max > args.eta_min) ||
            args.eta_count < 2) {
            throw UsageError("invalid eta grid");
        }
        if (!(args.epsilon > 0.0)) throw UsageError("--eps must be positive");
        atlas::FuelAtlasOptions options;
        options.epsilon = args.epsilon;
        options.jobs = args.jobs;
        options.solver.rng_seed = ctx.rng_seed;
        const auto grid = atlas::generate_fuel_atlas(
            atlas::linspace(first, last, args.dL_count),
            atlas::linspace(args.eta_min, args.eta_max, args.eta_count), options);
        atlas::write_atlas(grid, args.out);
        j["grid"] = {{"dL_first", first},          {"dL_last", last},
                     {"dL_count", args.dL_count},  {"eta_first", args.eta_min},
                     {"eta_last", args.eta_max},   {"eta_count", args.eta_count}};
        j["settings"] = {{"epsilon", args.epsilon},
                         {"jobs", args.jobs},
                         {"root", root_json(options.solver.root)},
                         {"quad", quad_json(options.solver.quad)},
                         {"random_attempts", options.solver.random_attempts}};
        j["converged_fraction"] = grid.converged_fraction();
        j["monotone_fraction"] = grid.monotone_fraction();
    } else {
        throw UsageError("--kind must be time or fuel");
    }
    j["timing_s"] = seconds_since(t0);
    write_json(ctx.out, j);
    return kExitOk;
}

int atlas_query(const AtlasQueryArgs& args, Context& ctx) {
    const auto t0 = Clock::now();
    if (!(args.delta_L > 0.0)) throw UsageError("--dL must be positive");
    if (!(args.eta > 0.0 && args.eta < 1.0)) throw UsageError("--eta must lie in (0, 1)");
    const auto grid = atlas::read_atlas(args.atlas);
    const auto cands = atlas::interpolate_seed(grid, args.delta_L, args.eta);

    Json j = header("atlas-query", ctx);
    j["atlas"] = {{"path", args.atlas},
                  {"epsilon", grid.meta.epsilon},
                  {"generator_version", grid.meta.generator_version},
                  {"rng_seed", grid.meta.rng_seed}};
    j["query"] = {{"delta_L", args.delta_L}, {"eta", args.eta}};
    Json list = Json::array();
    for (const auto& c : cands) {
        list.push_back({{"source", atlas::to_string(c.source)},
                        {"l0", c.l0},
                        {"l0_times_dL", c.l0 * args.delta_L},
                        {"l1", c.l1},
                        {"J_norm", c.J_norm}});
    }
    j["candidates"] = list;
    j["J_norm"] = cands.front().J_norm;
    if (args.solve) {
        fuelopt::FuelOptOptions options;
        options.rng_seed = ctx.rng_seed;
        const auto problem =
            fuelopt::FuelOptProblem::from_eta(args.delta_L, args.eta, grid.meta.epsilon);
        const auto sol = fuelopt::solve_fuel_optimal(problem, atlas::to_seeds(cands), options);
        j["solution"] = {{"l0", sol.l0},
                         {"l1", sol.l1},
                         {"J_norm", sol.J_norm()},
                         {"n_arcs", sol.n_arcs},
                         {"seed_source", fuelopt::to_string(sol.seed_source)},
                         {"attempts", sol.attempts},
                         {"iterations", sol.iterations}};
    }
    j["timing_s"] = seconds_since(t0);
    write_json(ctx.out, j);
    return kExitOk;
}

int validate(const ValidateArgs& args, Context& ctx) {
    const auto ids = args.cases.empty() ? reference_case_ids() : args.cases;
    const auto known = reference_case_ids();
    for (const auto& id : ids) {
        if (std::find(known.begin(), known.end(), id) == known.end()) {
            throw UsageError("unknown case '" + id + "'");
        }
    }
    Json j = header("validate", ctx);
    Json cases = Json::array();
    bool all_pass = true;
    int code = kExitOk;
    for (const auto& id : ids) {
        Json cj;
        cj["id"] = id;
        try {
            const auto res = validate_case(id);
            Json checks = Json::array();
            for (const auto& c : res.checks) {
                checks.push_back({{"name", c.name},
                                  {"value", c.value},
                                  {"reference", c.reference},
                                  {"tolerance", c.tolerance},
                                  {"relative", c.relative},
                                  {"pass", c.pass}});
            }
            Json info = Json::object();
            for (const auto& [k, v] : res.info) info[k] = v;
            cj["passed"] = res.passed();
            cj["checks"] = checks;
            cj["info"] = info;
            cj["timing_s"] = res.seconds;
            if (!res.passed()) {
                all_pass = false;
                code = kExitSolverFailure;
            }
        } catch (const StageError& e) {
            cj["passed"] = false;
            cj["failed_stage"] = e.stage;
            cj["error"] = e.what();
            ctx.err << "validate " << id << ": stage '" << e.stage << "' failed: " << e.what()
                    << '\n';
            all_pass = false;
            code = kExitSolverFailure;
        }
        cases.push_back(cj);
    }
    j["cases"] = cases;
    j["passed"] = all_pass;
    write_json(ctx.out, j);
    return code;
}

}  // namespace rephase::cli
