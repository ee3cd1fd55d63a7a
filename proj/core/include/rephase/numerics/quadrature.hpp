#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "rephase/error.hpp"
#include "rephase/numerics/settings.hpp"

namespace rephase::numerics {

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule on [-1, 1]. Odd
// indices of the abscissae are the Gauss nodes.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077926012739799, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651146};

template <std::size_t N>
struct Panel {
    double a, b;
    std::array<double, N> value;
    std::array<double, N> error;
    std::array<double, N> floor;  // roundoff limit of the error estimate
    double priority;
};

template <std::size_t N, class F>
Panel<N> gauss_kronrod(const F& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);

    std::array<std::array<double, N>, 21> fv;
    fv[10] = f(centr);
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = hlgth * kXgk[j];
        fv[j] = f(centr - dx);
        fv[20 - j] = f(centr + dx);
    }

    Panel<N> p{a, b, {}, {}, {}, 0.0};
    for (std::size_t c = 0; c < N; ++c) {
        double resk = kWgk[10] * fv[10][c];
        double resg = 0.0;
        double resabs = std::abs(resk);
        for (std::size_t j = 0; j < 10; ++j) {
            const double sum = fv[j][c] + fv[20 - j][c];
            resk += kWgk[j] * sum;
            resabs += kWgk[j] * (std::abs(fv[j][c]) + std::abs(fv[20 - j][c]));
            if (j % 2 == 1) resg += kWg[j / 2] * sum;
        }
        const double reskh = 0.5 * resk;
        double resasc = kWgk[10] * std::abs(fv[10][c] - reskh);
        for (std::size_t j = 0; j < 10; ++j) {
            resasc += kWgk[j] * (std::abs(fv[j][c] - reskh) + std::abs(fv[20 - j][c] - reskh));
        }
        resabs *= dhlgth;
        resasc *= dhlgth;
        double err = std::abs((resk - resg) * hlgth);
        if (resasc != 0.0 && err != 0.0) {
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        }
        const double fl = 50.0 * eps * resabs;
        err = std::max(err, fl);
        if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
        p.value[c] = resk * hlgth;
        p.error[c] = err;
        p.floor[c] = fl;
    }
    return p;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G10/K21) quadrature of N integrands that
/// share their evaluation points. Each component is converged to
/// |error| <= tol * max(1, |value|), or to the roundoff limit of the rule when
/// that is larger. The initial partition splits at every breakpoint inside
/// (a, b). Throws QuadratureError when the interval budget is exhausted.
template <std::size_t N, class F>
std::array<double, N> quad_adaptive_n(const F& f, double a, double b,
                                      const QuadSettings& settings = {},
                                      std::span<const double> breakpoints = {}) {
    std::array<double, N> zero{};
    if (a == b) return zero;
    const double sgn = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);

    std::vector<double> cuts{lo};
    for (double bp : breakpoints) {
        if (bp > lo && bp < hi) cuts.push_back(bp);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    using Panel = detail::Panel<N>;
    std::array<double, N> total{}, total_err{}, total_floor{};

    auto target = [&](std::size_t c) {
        return std::max(settings.tol * std::max(1.0, std::abs(total[c])), 2.0 * total_floor[c]);
    };
    auto score = [&](const Panel& p) {
        double s = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            const double t = std::max(settings.tol * std::max(1.0, std::abs(total[c])),
                                      std::numeric_limits<double>::min());
            s = std::max(s, (p.error[c] - p.floor[c]) / t);
        }
        return s;
    };
    auto cmp = [](const Panel& x, const Panel& y) { return x.priority < y.priority; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);

    auto accumulate = [&](const Panel& p, double s) {
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += s * p.value[c];
            total_err[c] += s * p.error[c];
            total_floor[c] += s * p.floor[c];
        }
    };

    std::vector<Panel> initial;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        initial.push_back(detail::gauss_kronrod<N>(f, cuts[i], cuts[i + 1]));
        accumulate(initial.back(), 1.0);
    }
    for (auto& p : initial) {
        p.priority = score(p);
        heap.push(p);
    }

    int intervals = static_cast<int>(initial.size());
    while (true) {
        bool done = true;
        for (std::size_t c = 0; c < N; ++c) {
            if (!(total_err[c] <= target(c))) done = false;
        }
        if (done) break;
        if (intervals >= settings.max_intervals || heap.empty()) {
            std::size_t wc = 0;
            double worst_ratio = 0.0;
            for (std::size_t c = 0; c < N; ++c) {
                const double ratio = total_err[c] / target(c);
                if (!(ratio <= worst_ratio)) {
                    worst_ratio = ratio;
                    wc = c;
                }
            }
            std::string where;
            if (!heap.empty()) {
                where = " near [" + std::to_string(heap.top().a) + ", " +
                        std::to_string(heap.top().b) + "]";
            }
            throw QuadratureError("quad_adaptive: interval budget exhausted in component " +
                                      std::to_string(wc) + where,
                                  total[wc], total_err[wc]);
        }
        Panel top = heap.top();
        heap.pop();
        const double mid = 0.5 * (top.a + top.b);
        if (!(mid > top.a && mid < top.b)) {
            throw QuadratureError("quad_adaptive: interval too small to bisect", total[0],
                                  top.error[0]);
        }
        Panel left = detail::gauss_kronrod<N>(f, top.a, mid);
        Panel right = detail::gauss_kronrod<N>(f, mid, top.b);
        accumulate(top, -1.0);
        accumulate(left, 1.0);
        accumulate(right, 1.0);
        left.priority = score(left);
        right.priority = score(right);
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    for (auto& v : total) v *= sgn;
    return total;
}

/// Scalar adaptive quadrature; see quad_adaptive_n.
double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     const QuadSettings& settings = {},
                     std::span<const double> breakpoints = {});

}  // namespace rephase::numerics
