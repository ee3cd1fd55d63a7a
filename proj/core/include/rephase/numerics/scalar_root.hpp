#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "rephase/numerics/settings.hpp"

namespace rephase::numerics {

struct Bracket {
    double lo;
    double hi;
};

struct ScalarRoot {
    double x;
    double residual;
    int iterations;
};

/// Value and derivative at a point.
using ValueAndSlope = std::function<std::pair<double, double>(double)>;

/// Newton iteration that keeps a sign-change bracket once one is seen and
/// falls back to bisection whenever a Newton step leaves it or stalls.
/// Without a supplied bracket one is discovered by marching downhill from x0
/// with a doubling step. Throws RootFindError when no bracket is found or the
/// iteration budget runs out.
ScalarRoot newton_scalar(const ValueAndSlope& fdf, double x0, const RootSettings& settings = {},
                         std::optional<Bracket> bracket = std::nullopt);

ScalarRoot newton_scalar(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double x0,
                         const RootSettings& settings = {},
                         std::optional<Bracket> bracket = std::nullopt);

/// Plain bisection on a sign-change bracket until the bracket is narrower
/// than x_tol or f vanishes. Throws RootFindError without a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol = 0.0,
              int max_iters = 200);

}  // namespace rephase::numerics
