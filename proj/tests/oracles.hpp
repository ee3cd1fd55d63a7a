#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

// Deliberately simple reference methods used to check the library: fixed-step
// composite Simpson, classical RK4 and central differences.

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

using Rhs = std::function<std::vector<double>(double, const std::vector<double>&)>;

inline std::vector<double> rk4(const Rhs& f, double a, double b, std::vector<double> y, int n) {
    const double h = (b - a) / n;
    auto axpy = [](const std::vector<double>& x, double s, const std::vector<double>& d) {
        std::vector<double> r(x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * d[i];
        return r;
    };
    for (int k = 0; k < n; ++k) {
        const double t = a + k * h;
        const auto k1 = f(t, y);
        const auto k2 = f(t + h / 2, axpy(y, h / 2, k1));
        const auto k3 = f(t + h / 2, axpy(y, h / 2, k2));
        const auto k4 = f(t + h, axpy(y, h, k3));
        for (std::size_t i = 0; i < y.size(); ++i) {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    return y;
}

inline double central(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// |a - b| <= tol * max(|a|, |b|, floor).
inline bool rel_close(double a, double b, double tol, double floor = 1e-12) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle
