#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rephase/error.hpp"
#include "rephase/linmodel.hpp"

using namespace rephase;

namespace {

// Columns of the control matrix, read off lin_rhs with unit controls.
std::array<LinState, 2> control_columns(double L) {
    const LinState zero{};
    return {lin_rhs(L, zero, {1.0, 0.0}), lin_rhs(L, zero, {0.0, 1.0})};
}

}  // namespace

TEST(LinModel, NominalOrbitIsEquilibrium) {
    const auto d = lin_rhs(0.7, {}, {});
    EXPECT_EQ(d.dp, 0.0);
    EXPECT_EQ(d.df, 0.0);
    EXPECT_EQ(d.dg, 0.0);
    EXPECT_EQ(d.dt, 0.0);
}

TEST(LinModel, ClosedFormCostatesSolveAdjointEquations) {
    // With a constant time costate l0, d(lp, lf, lg)/dL = -l0 d(dt')/d(dp, df, dg).
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double L = u(rng), l0 = u(rng), l1 = u(rng);
        const double h = 1e-5;
        auto comp = [&](int i) {
            return [=](double x) {
                const auto c = costates_closed_form(x, l0, l1);
                return i == 0 ? c.l_dp : i == 1 ? c.l_df : c.l_dg;
            };
        };
        EXPECT_NEAR(oracle::central(comp(0), L, h), -l0 * 1.5, 1e-8);
        EXPECT_NEAR(oracle::central(comp(1), L, h), 2.0 * l0 * std::cos(L), 1e-8);
        EXPECT_NEAR(oracle::central(comp(2), L, h), 2.0 * l0 * std::sin(L), 1e-8);
    }
}

TEST(LinModel, PrimerNormIsControlMatrixTransposeTimesCostates) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 50; ++k) {
        const double L = u(rng), l1 = u(rng), l0 = 1.7;
        const auto c = costates_closed_form(L, l0, l1);
        const auto cols = control_columns(L);
        const double vr = c.l_dp * cols[0].dp + c.l_df * cols[0].df + c.l_dg * cols[0].dg;
        const double vt = c.l_dp * cols[1].dp + c.l_df * cols[1].df + c.l_dg * cols[1].dg;
        EXPECT_NEAR(std::hypot(vr, vt) / l0, primer_norm(L, l1), 1e-12);
        EXPECT_NEAR(primer_norm(L, l1), std::hypot(primer_radial(L, l1), primer_transversal(L, l1)),
                    1e-13);
    }
}

TEST(LinModel, RadialComponentWithoutCancellation) {
    const double l1 = 2.0 - 1e-12, L = 1e-7;
    // l1 - 2 is exact in double; the cosine enters only through its series.
    const double ref = (l1 - 2.0) - l1 * (L * L / 2.0 - L * L * L * L / 24.0);
    EXPECT_NEAR(primer_radial(L, l1), ref, 1e-14 * std::abs(ref));
}

TEST(LinModel, OptimalDirectionMinimizesHamiltonian) {
    // Brute force over directions: the control term of H is l . B u.
    for (double L : {-2.0, -0.3, 0.4, 1.9}) {
        for (Sign s : {Sign::plus, Sign::minus}) {
            const double l1 = 1.3, l0 = value(s);
            const auto c = costates_closed_form(L, l0, l1);
            const auto cols = control_columns(L);
            auto h = [&](const ControlLVLH& a) {
                return (c.l_dp * cols[0].dp + c.l_df * cols[0].df + c.l_dg * cols[0].dg) * a.a_r +
                       (c.l_dp * cols[1].dp + c.l_df * cols[1].df + c.l_dg * cols[1].dg) * a.a_th;
            };
            double best = INFINITY;
            for (int k = 0; k < 3600; ++k) {
                best = std::min(best, h(from_magnitude_angle(1.0, k * std::numbers::pi / 1800)));
            }
            const double opt = h(optimal_control(L, l1, s, 1.0));
            EXPECT_LE(opt, best + 1e-12);
            EXPECT_NEAR(opt, best, 1e-5);
        }
    }
}

TEST(LinModel, SingularDirectionRaises) {
    EXPECT_THROW(unit_control_direction(0.0, 2.0, Sign::plus), SingularDirectionError);
}

TEST(LinModel, ControlAngleConvention) {
    const auto a = from_magnitude_angle(2.0, 0.0);
    EXPECT_NEAR(a.a_th, 2.0, 1e-15);
    EXPECT_NEAR(a.a_r, 0.0, 1e-15);
    EXPECT_NEAR(from_magnitude_angle(1.0, 0.3).gamma(), 0.3, 1e-15);
    EXPECT_NEAR(from_magnitude_angle(3.0, 0.3).magnitude(), 3.0, 1e-15);
}

TEST(LinModel, PropagationMatchesRk4) {
    auto control = [](double L) { return ControlLVLH{0.1 * std::sin(2 * L), 0.05 * std::cos(L)}; };
    const double dL = 3.0;
    const auto sol = propagate_linear(control, dL);
    const auto ref = oracle::rk4(
        [&](double L, const std::vector<double>& y) {
            const auto d = lin_rhs(L, {y[0], y[1], y[2], y[3]}, control(L));
            return std::vector<double>{d.dp, d.df, d.dg, d.dt};
        },
        -dL / 2, dL / 2, {0, 0, 0, 0}, 20000);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(sol.final_state()[i], ref[i], 1e-12);
}
