#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "rephase/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "rephase");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = rephase::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "rephase_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, TimeSolveReferenceCase) {
    const auto r = run({"time-solve", "--dtf", "-0.005", "--amax", "0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_NEAR(j["solution"]["delta_L"].get<double>(), 0.44866, 5e-6);
    EXPECT_EQ(j["solution"]["sign_l0"].get<int>(), 1);
    EXPECT_EQ(j["version"].get<std::string>(), REPHASE_VERSION);
    EXPECT_TRUE(j.contains("settings"));
    EXPECT_TRUE(j["solver"].contains("residual"));
}

TEST(Cli, TimeSolveShortTermLimit) {
    const auto r = run({"time-solve", "--chi", "1e-9"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.json()["solution"]["delta_L"].get<double>(), 2.0 * std::sqrt(1e-9), 1e-12);
}

TEST(Cli, TimeSolveIterationBound) {
    for (const char* strategy : {"double-loop", "hybrid2d"}) {
        const auto r = run({"time-solve", "--chi", "10", "--strategy", strategy});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_LE(r.json()["solver"]["iterations"].get<int>(), 12);
    }
}

TEST(Cli, SeventeenSignificantDigits) {
    const auto r = run({"time-solve", "--chi", "0.05"});
    ASSERT_EQ(r.code, 0);
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, std::regex("\"delta_L\": ([-0-9.e+]+)")));
    const std::string digits = std::regex_replace(m[1].str(), std::regex("e.*|[-.]|^[-0.]+"), "");
    EXPECT_EQ(digits.size(), 17u) << m[1];
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"time-solve", "--chi", "0"}).code, 1);
    EXPECT_EQ(run({"time-solve", "--chi", "1", "--dtf", "-1", "--amax", "1"}).code, 1);
    EXPECT_EQ(run({"time-solve", "--dtf", "-1"}).code, 1);
    EXPECT_EQ(run({"time-solve", "--chi", "1", "--strategy", "newton"}).code, 1);
    EXPECT_EQ(run({"fuel-solve", "--dL", "1", "--eta", "1.5"}).code, 1);
    EXPECT_EQ(run({"fuel-solve", "--dL", "1", "--eta", "0.5", "--nonlinear"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, FuelSolveReferenceCase) {
    const auto r = run({"fuel-solve", "--dL", "0.5", "--eta", "0.4", "--eps", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_NEAR(j["solution"]["J_norm"].get<double>(), 0.61117, 1e-3);
    EXPECT_EQ(j["solution"]["n_arcs"].get<int>(), 2);
    EXPECT_EQ(j["epsilon_path"].size(), 1u);
}

TEST(Cli, FuelSolveContinuationNonlinear) {
    const auto r = run({"fuel-solve", "--dL", "50", "--eta", "0.8", "--eps", "0.01", "--continue-to",
                        "1e-6", "--nonlinear", "--amax", "0.001"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_NEAR(j["nonlinear"]["J_norm"].get<double>(), 0.20481, 1e-3 * 0.20481);
    EXPECT_EQ(j["nonlinear"]["n_arcs"].get<int>(), 4);
    EXPECT_DOUBLE_EQ(j["nonlinear"]["epsilon_path"].back().get<double>(), 1e-6);
}

TEST(Cli, FuelSolveInfeasible) {
    const auto r = run({"fuel-solve", "--dL", "0.3", "--dtf", "-0.005", "--amax", "0.1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("0.44866"), std::string::npos) << r.err;
}

TEST(Cli, SeedFromEnvironment) {
    ::setenv("REPHASE_SEED", "12345", 1);
    const auto r = run({"fuel-solve", "--dL", "2", "--eta", "0.5", "--eps", "0.1"});
    ::unsetenv("REPHASE_SEED");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.json()["rng_seed"].get<std::uint64_t>(), 12345u);
}

TEST(Cli, ProfileCsv) {
    const auto path = scratch("profile.csv").string();
    const auto r = run({"fuel-solve", "--dL", "8", "--eta", "0.6", "--profile", path, "--samples", "51"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "L,a_r,a_th,gamma_deg,dp,df,dg,dt,rho");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 51);
}

TEST(Cli, AtlasGenAndQuery) {
    const auto path = scratch("fuel.csv").string();
    const auto g = run({"atlas-gen", "--kind", "fuel", "--out", path, "--dL-min", "1", "--dL-max", "5",
                        "--dL-count", "5", "--eta-min", "0.3", "--eta-max", "0.7", "--eta-count", "5",
                        "--jobs", "2"});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_DOUBLE_EQ(g.json()["converged_fraction"].get<double>(), 1.0);
    const auto q = run({"atlas-query", "--atlas", path, "--dL", "2", "--eta", "0.4", "--solve"});
    ASSERT_EQ(q.code, 0) << q.err;
    const auto j = q.json();
    EXPECT_NEAR(j["J_norm"].get<double>(), j["solution"]["J_norm"].get<double>(), 1e-12);
    EXPECT_EQ(j["solution"]["iterations"].get<int>(), 0);
    EXPECT_EQ(run({"atlas-query", "--atlas", scratch("missing.csv").string(), "--dL", "2", "--eta",
                   "0.4"}).code,
              1);
}

TEST(Cli, TimeAtlas) {
    const auto path = scratch("time.csv").string();
    const auto g = run({"atlas-gen", "--kind", "time", "--out", path});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_TRUE(g.json()["chi_strictly_increasing"].get<bool>());
    EXPECT_EQ(g.json()["points"].get<int>(), 1000);
}

TEST(Cli, ValidateTimeCases) {
    const auto r = run({"validate", "--case", "table2:1", "--case", "table2:2s3"});
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = r.json();
    for (const auto& c : j["cases"]) {
        for (const auto& k : c["checks"]) {
            if (k["name"] == "nonlinear.dL" && c["id"] == "table2:1") {
                EXPECT_NEAR(k["value"].get<double>(), 0.45366, 1e-3);
            }
            if (k["name"] == "dL_error") {
                EXPECT_NEAR(k["value"].get<double>(), 0.098, 0.005);
            }
        }
    }
}

TEST(Cli, ValidateFuelCase) {
    const auto r = run({"validate", "--case", "table4:2"});
    ASSERT_EQ(r.code, 0) << r.out;
    bool seen = false;
    const auto doc1 = r.json();
    for (const auto& k : doc1["cases"][0]["checks"]) {
        if (k["name"] == "nonlinear.lt") {
            EXPECT_NEAR(k["value"].get<double>(), 0.10776, 1e-3);
            seen = true;
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Cli, ValidateUnknownCase) { EXPECT_EQ(run({"validate", "--case", "table9:1"}).code, 1); }

TEST(Cli, ReferenceCasesEmbedded) {
    const auto ids = rephase::cli::reference_case_ids();
    EXPECT_EQ(ids.size(), 8u);
    EXPECT_THROW(rephase::cli::validate_case("nope"), rephase::DomainError);
}
