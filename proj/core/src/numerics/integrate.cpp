#include "rephase/numerics/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rephase/error.hpp"

namespace rephase::numerics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;

double initial_step(const OdeRhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, double direction, double span,
                    const IntegratorSettings& s) {
    const std::size_t n = y0.size();
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = s.abs_tol + s.rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1n += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1n = std::sqrt(d1n / n);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, span);

    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + direction * h0 * f0[i];
    rhs(t0 + direction * h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = s.abs_tol + s.rel_tol * std::abs(y0[i]);
        const double v = (f1[i] - f0[i]) / sc;
        d2 += v * v;
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dmax = std::max(d1n, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

OdeSolution::OdeSolution(std::size_t dim, double t0, std::vector<double> y0)
    : dim_(dim), times_{t0}, states_(std::move(y0)) {}

std::span<const double> OdeSolution::final_state() const& { return state_at_node(steps()); }

std::span<const double> OdeSolution::state_at_node(std::size_t k) const& {
    return {states_.data() + k * dim_, dim_};
}

void OdeSolution::append_step(double t_next, std::span<const double> y_next,
                              std::span<const double> dense) {
    times_.push_back(t_next);
    states_.insert(states_.end(), y_next.begin(), y_next.end());
    dense_.insert(dense_.end(), dense.begin(), dense.end());
}

std::vector<double> OdeSolution::operator()(double t) const {
    std::vector<double> out(dim_);
    const std::size_t nsteps = steps();
    if (nsteps == 0) {
        std::copy_n(states_.begin(), dim_, out.begin());
        return out;
    }
    const bool forward = times_.back() >= times_.front();
    // Index k of the step [times_[k], times_[k+1]] containing t.
    std::size_t k;
    if (forward) {
        t = std::clamp(t, times_.front(), times_.back());
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    } else {
        t = std::clamp(t, times_.back(), times_.front());
        auto it = std::upper_bound(times_.begin(), times_.end(), t, std::greater<>());
        k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    }
    k = std::min(k, nsteps - 1);
    const double h = times_[k + 1] - times_[k];
    const double theta = (t - times_[k]) / h;
    const double theta1 = 1.0 - theta;
    const double* r = dense_.data() + k * 5 * dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double r1 = r[i], r2 = r[dim_ + i], r3 = r[2 * dim_ + i], r4 = r[3 * dim_ + i],
                     r5 = r[4 * dim_ + i];
        out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
    }
    return out;
}

OdeSolution integrate(const OdeRhs& rhs, double a, double b, std::vector<double> y0,
                      const IntegratorSettings& s, std::span<const double> breakpoints) {
    const std::size_t n = y0.size();
    OdeSolution sol(n, a, y0);
    if (a == b) return sol;

    const double direction = b > a ? 1.0 : -1.0;
    std::vector<double> stops;
    for (double bp : breakpoints) {
        if ((bp - a) * direction > 0.0 && (b - bp) * direction > 0.0) stops.push_back(bp);
    }
    std::sort(stops.begin(), stops.end(),
              [direction](double x, double y) { return x * direction < y * direction; });
    stops.push_back(b);
    std::size_t next_stop = 0;

    std::vector<double> y = std::move(y0), ynew(n), ytmp(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> dense(5 * n);

    double t = a;
    rhs(t, y, k1);
    long evals = 1;
    double h = s.initial_step > 0.0
                   ? s.initial_step
                   : initial_step(rhs, t, y, k1, direction, std::abs(b - a), s);
    if (s.initial_step <= 0.0) ++evals;
    bool last_rejected = false;
    long step_count = 0;

    while (true) {
        const double target = stops[next_stop];
        const double remaining = std::abs(target - t);
        bool lands = false;
        const double h_natural = h;
        if (h >= remaining) {
            h = remaining;
            lands = true;
        }
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() *
                                std::max(std::abs(t), 1.0);
        if (h < min_step && !lands) {
            throw IntegrationError("integrate: step size underflow", t, y);
        }
        if (++step_count > s.max_steps) {
            throw IntegrationError("integrate: maximum step count exceeded", t, y);
        }

        const double hs = direction * h;
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                   a65 * k5[i]);
        const double t_new = lands ? target : t + hs;
        rhs(t + hs, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                   a76 * k6[i]);
        rhs(t_new, ynew, k7);
        evals += 6;

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double sc = s.abs_tol + s.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err)) {
            h *= kFacMin;
            last_rejected = true;
            continue;
        }

        if (err <= 1.0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double dy = ynew[i] - y[i];
                const double bspl = hs * k1[i] - dy;
                dense[i] = y[i];
                dense[n + i] = dy;
                dense[2 * n + i] = bspl;
                dense[3 * n + i] = dy - hs * k7[i] - bspl;
                dense[4 * n + i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                         d6 * k6[i] + d7 * k7[i]);
            }
            sol.append_step(t_new, ynew, dense);
            t = t_new;
            std::swap(y, ynew);
            std::swap(k1, k7);
            if (lands && ++next_stop == stops.size()) break;
            double fac = err == 0.0 ? kFacMax : kSafety * std::pow(err, -0.2);
            fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
            h *= fac;
            // A step shortened to hit a stop says little about the natural step.
            if (lands) h = std::max(h, h_natural);
            last_rejected = false;
        } else {
            h *= std::max(kFacMin, kSafety * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    sol.rhs_evals_ = evals;
    return sol;
}

}  // namespace rephase::numerics
