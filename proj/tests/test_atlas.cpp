#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rephase/atlas.hpp"
#include "rephase/error.hpp"

using namespace rephase;
using namespace rephase::atlas;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class AtlasFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("rephase_atlas_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& body) const {
        std::ofstream(path(name)) << body;
    }

    fs::path dir_;
};

// Hand-built 3x3 grid with a costate jump between the second and third eta.
AtlasGrid synthetic_grid() {
    AtlasGrid g;
    g.dL_axis = {1.0, 2.0, 3.0};
    g.eta_axis = {0.3, 0.5, 0.7};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const double l1 = j == 2 ? 2.5 : 1.0 + 0.1 * static_cast<double>(i);
            g.cells.push_back({1.0 + static_cast<double>(i + j), l1, 0.7 - 0.2 * static_cast<double>(j),
                               j == 2 ? 4 : 2, true, 0.1});
        }
    }
    g.meta.epsilon = 0.1;
    g.meta.generator_version = "test";
    return g;
}

}  // namespace

TEST(Atlas, Linspace) {
    const auto v = linspace(0.5, 50.0, 100);
    ASSERT_EQ(v.size(), 100u);
    EXPECT_EQ(v.front(), 0.5);
    EXPECT_EQ(v.back(), 50.0);
    EXPECT_NEAR(v[1] - v[0], 0.5, 1e-15);
}

TEST(Atlas, TimeCurveIsIncreasing) {
    const auto c = generate_time_atlas(0.0125, 12.5, 0.0125);
    ASSERT_EQ(c.size(), 1000u);
    for (std::size_t k = 1; k < c.size(); ++k) {
        ASSERT_TRUE(c[k].converged);
        EXPECT_GT(c[k].chi, c[k - 1].chi) << c[k].delta_L;
    }
}

TEST(Atlas, SmallGridConvergesAndIsDeterministic) {
    FuelAtlasOptions o;
    o.epsilon = 0.1;
    const auto dl = linspace(0.5, 30.0, 6), eta = linspace(0.3, 0.9, 7);
    const auto a = generate_fuel_atlas(dl, eta, o);
    o.jobs = 3;
    const auto b = generate_fuel_atlas(dl, eta, o);
    EXPECT_EQ(a.converged_fraction(), 1.0);
    EXPECT_EQ(a.monotone_fraction(), 1.0);
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
        EXPECT_EQ(a.cells[k].l1, b.cells[k].l1);
        EXPECT_EQ(a.cells[k].J_norm, b.cells[k].J_norm);
    }
}

TEST(Atlas, RejectsBadAxes) {
    EXPECT_THROW(generate_fuel_atlas({}, {0.5}), DomainError);
    EXPECT_THROW(generate_fuel_atlas({1.0, 1.0}, {0.5}), DomainError);
}

TEST(Atlas, QueryAtNodeEchoesCell) {
    const auto g = synthetic_grid();
    const auto c = interpolate_seed(g, 2.0, 0.3);
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c.front().l1, g.cell(1, 0).l1);
    EXPECT_DOUBLE_EQ(c.front().l0 * 2.0, g.cell(1, 0).l0_times_dL);
    EXPECT_DOUBLE_EQ(c.front().J_norm, g.cell(1, 0).J_norm);
}

TEST(Atlas, SmoothCellIsBilinear) {
    const auto g = synthetic_grid();
    const auto c = interpolate_seed(g, 1.5, 0.4);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].source, CandidateSource::interpolated);
    EXPECT_NEAR(c[0].l1, 1.05, 1e-14);
    EXPECT_NEAR(c[0].l0 * 1.5, 2.0, 1e-14);
    EXPECT_NEAR(c[0].J_norm, 0.6, 1e-14);
}

TEST(Atlas, MutationGivesNearestCells) {
    const auto g = synthetic_grid();
    const auto c = interpolate_seed(g, 1.2, 0.65);
    ASSERT_GE(c.size(), 2u);
    for (const auto& s : c) EXPECT_EQ(s.source, CandidateSource::nearest_cell);
    // Nearest corner first: (1.0, 0.7).
    EXPECT_EQ(c[0].l1, 2.5);
}

TEST(Atlas, OutsideHullFallsBackToAnalytic) {
    const auto g = synthetic_grid();
    for (auto [dL, eta] : {std::pair{0.5, 0.5}, {10.0, 0.5}, {2.0, 0.95}}) {
        const auto c = interpolate_seed(g, dL, eta);
        ASSERT_EQ(c.size(), 1u);
        EXPECT_EQ(c[0].source, CandidateSource::analytic);
        EXPECT_DOUBLE_EQ(c[0].J_norm, 1.0 - eta);
    }
}

TEST_F(AtlasFiles, RoundTripIsByteIdentical) {
    auto g = synthetic_grid();
    g.cell(2, 2).converged = false;
    write_atlas(g, path("a.csv"));
    const auto back = read_atlas(path("a.csv"));
    write_atlas(back, path("b.csv"));
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(back.dL_axis, g.dL_axis);
    EXPECT_FALSE(back.cell(2, 2).converged);
    EXPECT_EQ(back.meta.generator_version, "test");
}

TEST_F(AtlasFiles, UnknownColumn) {
    write_atlas(synthetic_grid(), path("a.csv"));
    auto body = slurp(path("a.csv"));
    body.replace(body.find("J_norm"), 6, "J_bad");
    write("a.csv", body);
    try {
        read_atlas(path("a.csv"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("J_bad"), std::string::npos);
        EXPECT_EQ(e.line, 1);
    }
}

TEST_F(AtlasFiles, BadNumberNamesLine) {
    write_atlas(synthetic_grid(), path("a.csv"));
    auto body = slurp(path("a.csv"));
    const auto third = body.find('\n', body.find('\n', body.find('\n') + 1) + 1) + 1;
    body.replace(third, 1, "x");
    write("a.csv", body);
    try {
        read_atlas(path("a.csv"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 4);
    }
}

TEST_F(AtlasFiles, MissingSidecarAndSchemaMismatch) {
    write_atlas(synthetic_grid(), path("a.csv"));
    fs::remove(path("a.csv.json"));
    EXPECT_THROW(read_atlas(path("a.csv")), ParseError);
    write_atlas(synthetic_grid(), path("a.csv"));
    auto meta = slurp(path("a.csv.json"));
    meta.replace(meta.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
    write("a.csv.json", meta);
    EXPECT_THROW(read_atlas(path("a.csv")), ParseError);
}

TEST_F(AtlasFiles, IncompleteGrid) {
    write_atlas(synthetic_grid(), path("a.csv"));
    auto body = slurp(path("a.csv"));
    body.erase(body.rfind('\n', body.size() - 2) + 1);
    write("a.csv", body);
    EXPECT_THROW(read_atlas(path("a.csv")), ParseError);
}

TEST(AtlasFixture, DeskAtlasAtSmallEpsilon) {
    const auto g = read_atlas(REPHASE_TEST_DATA "/fuel_eps001.csv");
    EXPECT_EQ(g.dL_axis.size(), 100u);
    EXPECT_EQ(g.eta_axis.size(), 61u);
    EXPECT_DOUBLE_EQ(g.meta.epsilon, 0.01);
    EXPECT_GE(g.converged_fraction(), 0.99);
    EXPECT_GE(g.monotone_fraction(), 0.99);
    for (const auto& c : g.cells) {
        if (!c.converged) continue;
        EXPECT_TRUE(c.n_arcs == 2 || c.n_arcs == 4) << c.n_arcs;
        EXPECT_GT(c.J_norm, 0.0);
        EXPECT_LT(c.J_norm, 1.0);
    }
}
