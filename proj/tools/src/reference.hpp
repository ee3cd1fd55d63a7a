#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

// Published reference solutions, embedded at build time.

namespace rephase::cli {

struct TimeRow {
    std::array<double, 3> lx;
    double delta_L;
};

struct TimeCase {
    std::string id;
    double dt_f;
    double a_max;
    double chi;
    TimeRow linear;
    TimeRow nonlinear;
    /// Relative dL gap between the linear and nonlinear solutions: either an
    /// expected value with tolerance, or only an upper bound.
    std::optional<double> dL_error;
    double dL_error_tol = 0.0;
    std::optional<double> dL_error_max;
};

struct FuelRow {
    std::array<double, 3> lx;
    double lt;
    double J_norm;
};

struct FuelCase {
    std::string id;
    double delta_L;
    double eta;
    double dt_f;
    double a_max;
    double epsilon;
    FuelRow linear;
    FuelRow nonlinear;
    FuelRow optimal;
    std::vector<int> n_arcs;
};

struct ReferenceCases {
    std::vector<TimeCase> time;
    std::vector<FuelCase> fuel;
};

const ReferenceCases& reference_cases();

}  // namespace rephase::cli
