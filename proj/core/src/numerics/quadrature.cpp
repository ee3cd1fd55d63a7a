#include "rephase/numerics/quadrature.hpp"

namespace rephase::numerics {

double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     const QuadSettings& settings, std::span<const double> breakpoints) {
    auto wrapped = [&f](double x) { return std::array<double, 1>{f(x)}; };
    return quad_adaptive_n<1>(wrapped, a, b, settings, breakpoints)[0];
}

}  // namespace rephase::numerics
