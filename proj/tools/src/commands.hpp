#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rephase/error.hpp"

namespace rephase::cli {

/// Bad or inconsistent command-line input; maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::uint64_t rng_seed;
};

struct TimeSolveArgs {
    std::optional<double> chi;
    std::optional<double> dt_f;
    std::optional<double> a_max;
    std::string strategy = "double-loop";
    std::string profile;
    int samples = 401;
};

struct FuelSolveArgs {
    std::optional<double> delta_L;
    std::optional<double> eta;
    std::optional<double> dt_f;
    std::optional<double> a_max;
    double epsilon = 0.01;
    std::optional<double> continue_to;
    std::string atlas;
    bool nonlinear = false;
    std::string profile;
    int samples = 401;
};

struct AtlasGenArgs {
    std::string kind;
    std::string out;
    double dL_min = 0.0;
    double dL_max = 0.0;
    double dL_step = 0.0125;
    std::size_t dL_count = 100;
    double eta_min = 0.30;
    double eta_max = 0.90;
    std::size_t eta_count = 61;
    double epsilon = 0.1;
    unsigned jobs = 1;
};

struct AtlasQueryArgs {
    std::string atlas;
    double delta_L = 0.0;
    double eta = 0.0;
    bool solve = false;
};

struct ValidateArgs {
    std::vector<std::string> cases;
};

int time_solve(const TimeSolveArgs& args, Context& ctx);
int fuel_solve(const FuelSolveArgs& args, Context& ctx);
int atlas_gen(const AtlasGenArgs& args, Context& ctx);
int atlas_query(const AtlasQueryArgs& args, Context& ctx);
int validate(const ValidateArgs& args, Context& ctx);

}  // namespace rephase::cli
