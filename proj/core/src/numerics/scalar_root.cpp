#include "rephase/numerics/scalar_root.hpp"

#include <cmath>
#include <limits>

#include "rephase/error.hpp"

namespace rephase::numerics {

namespace {

bool opposite_signs(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

}  // namespace

ScalarRoot newton_scalar(const ValueAndSlope& fdf, double x0, const RootSettings& s,
                         std::optional<Bracket> bracket) {
    double x = x0;
    auto [fx, dfx] = fdf(x);
    if (!std::isfinite(fx)) throw RootFindError("newton_scalar: non-finite value at seed");

    // Bracket endpoints with their values; f_lo and f_hi have opposite signs.
    bool have_bracket = false;
    double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0;
    if (bracket) {
        lo = bracket->lo;
        hi = bracket->hi;
        f_lo = fdf(lo).first;
        f_hi = fdf(hi).first;
        if (!opposite_signs(f_lo, f_hi)) {
            if (f_lo == 0.0) return {lo, 0.0, 0};
            if (f_hi == 0.0) return {hi, 0.0, 0};
            throw RootFindError("newton_scalar: supplied interval does not bracket a root");
        }
        have_bracket = true;
        if (!(x > std::min(lo, hi) && x < std::max(lo, hi))) {
            x = 0.5 * (lo + hi);
            std::tie(fx, dfx) = fdf(x);
        }
    }

    double march = 0.0;  // signed step used while searching for a bracket
    for (int it = 1; it <= s.max_iters; ++it) {
        if (std::abs(fx) <= s.residual_tol) return {x, fx, it - 1};

        if (have_bracket) {
            if (opposite_signs(fx, f_lo)) {
                hi = x;
                f_hi = fx;
            } else {
                lo = x;
                f_lo = fx;
            }
            const double a = std::min(lo, hi), b = std::max(lo, hi);
            if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
                return {x, fx, it - 1};
            }
            double next = (dfx != 0.0 && std::isfinite(dfx)) ? x - fx / dfx : a - 1.0;
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            const double prev_f = fx;
            x = next;
            std::tie(fx, dfx) = fdf(x);
            // Slow Newton progress: take a bisection step as well.
            if (std::abs(fx) > 0.5 * std::abs(prev_f) && it > 2) {
                if (opposite_signs(fx, f_lo)) {
                    hi = x;
                    f_hi = fx;
                } else {
                    lo = x;
                    f_lo = fx;
                }
                x = 0.5 * (lo + hi);
                std::tie(fx, dfx) = fdf(x);
            }
            continue;
        }

        // Bracket search: Newton direction, doubling step when it misbehaves.
        double step;
        if (dfx != 0.0 && std::isfinite(dfx)) {
            step = -fx / dfx;
            if (march != 0.0 && std::abs(step) < std::abs(march) && step * march > 0.0) {
                step = march * 2.0;
            }
        } else {
            step = march != 0.0 ? 2.0 * march : 1e-3 * std::max(1.0, std::abs(x));
        }
        march = step;
        const double xn = x + step;
        auto [fn, dfn] = fdf(xn);
        if (!std::isfinite(fn)) throw RootFindError("newton_scalar: non-finite value");
        if (opposite_signs(fx, fn) || fn == 0.0) {
            have_bracket = fn != 0.0;
            lo = x;
            f_lo = fx;
            hi = xn;
            f_hi = fn;
        } else if (std::abs(fn) < std::abs(fx)) {
            march = 0.0;  // plain Newton is making progress
        }
        x = xn;
        fx = fn;
        dfx = dfn;
    }
    if (std::abs(fx) <= s.residual_tol) return {x, fx, s.max_iters};
    throw RootFindError("newton_scalar: iteration budget exhausted (|f| = " +
                        std::to_string(std::abs(fx)) + ")");
}

ScalarRoot newton_scalar(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double x0,
                         const RootSettings& settings, std::optional<Bracket> bracket) {
    return newton_scalar([&](double x) { return std::pair{f(x), df(x)}; }, x0, settings, bracket);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iters) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!opposite_signs(flo, fhi)) throw RootFindError("bisect: no sign change on interval");
    for (int i = 0; i < max_iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi || std::abs(hi - lo) <= x_tol) return mid;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (opposite_signs(flo, fm)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace rephase::numerics
