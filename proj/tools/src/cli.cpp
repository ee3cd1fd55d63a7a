#include "rephase/cli.hpp"

#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace rephase::cli {

namespace {

// Default seed for the random restarts; REPHASE_SEED overrides it.
constexpr std::uint64_t kDefaultSeed = 20240229;

std::uint64_t seed_from_env() {
    const char* s = std::getenv("REPHASE_SEED");
    if (s == nullptr || *s == '\0') return kDefaultSeed;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw UsageError(std::string("REPHASE_SEED is not an integer: ") + s);
    return v;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Low-thrust rephasing solver"};
    app.name("rephase");
    app.set_version_flag("--version", REPHASE_VERSION);
    app.require_subcommand(1);

    TimeSolveArgs ts;
    auto* time = app.add_subcommand("time-solve", "Time-optimal transfer on the linearized model");
    time->add_option("--chi", ts.chi, "Key parameter -sign(l0) dt_f / a_max");
    time->add_option("--dtf", ts.dt_f, "Final time offset, canonical units");
    time->add_option("--amax", ts.a_max, "Thrust acceleration, canonical units");
    time->add_option("--strategy", ts.strategy, "double-loop or hybrid2d")->capture_default_str();
    time->add_option("--profile", ts.profile, "Write the control profile CSV here");
    time->add_option("--samples", ts.samples, "Profile rows")->capture_default_str();

    FuelSolveArgs fs;
    auto* fuel = app.add_subcommand("fuel-solve", "Propellant-optimal transfer with fixed dL");
    fuel->add_option("--dL", fs.delta_L, "True longitude span");
    fuel->add_option("--eta", fs.eta, "Slack parameter in (0, 1)");
    fuel->add_option("--dtf", fs.dt_f, "Final time offset instead of --eta");
    fuel->add_option("--amax", fs.a_max, "Thrust acceleration");
    fuel->add_option("--eps", fs.epsilon, "Smoothing parameter")->capture_default_str();
    fuel->add_option("--continue-to", fs.continue_to, "Continue epsilon down to this value");
    fuel->add_option("--atlas", fs.atlas, "Seed from this fuel atlas");
    fuel->add_flag("--nonlinear", fs.nonlinear, "Refine on the nonlinear dynamics");
    fuel->add_option("--profile", fs.profile, "Write the control profile CSV here");
    fuel->add_option("--samples", fs.samples, "Profile rows")->capture_default_str();

    AtlasGenArgs ag;
    auto* gen = app.add_subcommand("atlas-gen", "Tabulate time or fuel solutions");
    gen->add_option("--kind", ag.kind, "time or fuel")->required();
    gen->add_option("--out", ag.out, "CSV path; metadata goes to PATH.json")->required();
    gen->add_option("--dL-min", ag.dL_min, "First dL");
    gen->add_option("--dL-max", ag.dL_max, "Last dL");
    gen->add_option("--dL-step", ag.dL_step, "dL spacing of the time curve")
        ->capture_default_str();
    gen->add_option("--dL-count", ag.dL_count, "dL points of the fuel grid")
        ->capture_default_str();
    gen->add_option("--eta-min", ag.eta_min, "First eta")->capture_default_str();
    gen->add_option("--eta-max", ag.eta_max, "Last eta")->capture_default_str();
    gen->add_option("--eta-count", ag.eta_count, "eta points")->capture_default_str();
    gen->add_option("--eps", ag.epsilon, "Smoothing parameter")->capture_default_str();
    gen->add_option("--jobs", ag.jobs, "Worker threads, 0 for all cores")->capture_default_str();

    AtlasQueryArgs aq;
    auto* query = app.add_subcommand("atlas-query", "Seed candidates from a fuel atlas");
    query->add_option("--atlas", aq.atlas, "Atlas CSV")->required();
    query->add_option("--dL", aq.delta_L, "True longitude span")->required();
    query->add_option("--eta", aq.eta, "Slack parameter")->required();
    query->add_flag("--solve", aq.solve, "Also solve from the candidates");

    ValidateArgs va;
    auto* val = app.add_subcommand("validate", "Compare against the reference cases");
    val->add_option("--case", va.cases, "Case id, repeatable; all cases when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Context ctx{out, err, seed_from_env()};
        if (*time) return time_solve(ts, ctx);
        if (*fuel) return fuel_solve(fs, ctx);
        if (*gen) return atlas_gen(ag, ctx);
        if (*query) return atlas_query(aq, ctx);
        return validate(va, ctx);
    } catch (const UsageError& e) {
        err << "rephase: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "rephase: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "rephase: infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const NonconvergenceError& e) {
        err << "rephase: solver failed: " << e.what() << '\n';
        if (!e.last_residual.empty()) {
            err << "  last residual:";
            for (double r : e.last_residual) err << ' ' << r;
            err << '\n';
        }
        return kExitSolverFailure;
    } catch (const Error& e) {
        err << "rephase: solver failed: " << e.what() << '\n';
        return kExitSolverFailure;
    }
}

}  // namespace rephase::cli
