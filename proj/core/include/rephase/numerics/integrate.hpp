#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rephase/numerics/settings.hpp"

namespace rephase::numerics {

/// dy/dt written into the third argument; it has the size of y.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Accepted steps of an adaptive Dormand-Prince 5(4) run with the fourth-order
/// continuous extension, so the solution can be sampled anywhere in the span.
class OdeSolution {
public:
    OdeSolution(std::size_t dim, double t0, std::vector<double> y0);

    std::size_t dim() const { return dim_; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    std::size_t steps() const { return times_.size() - 1; }
    long rhs_evaluations() const { return rhs_evals_; }

    // Views into the stored steps; not available on temporaries.
    std::span<const double> final_state() const&;
    std::span<const double> final_state() && = delete;
    std::span<const double> state_at_node(std::size_t k) const&;
    std::span<const double> state_at_node(std::size_t) && = delete;
    std::span<const double> times() const& { return times_; }
    std::span<const double> times() && = delete;

    /// Dense evaluation. Arguments outside the span are clamped to it.
    std::vector<double> operator()(double t) const;

private:
    friend OdeSolution integrate(const OdeRhs&, double, double, std::vector<double>,
                                 const IntegratorSettings&, std::span<const double>);

    void append_step(double t_next, std::span<const double> y_next, std::span<const double> dense);

    std::size_t dim_;
    std::vector<double> times_;
    std::vector<double> states_;  // (steps+1) x dim
    std::vector<double> dense_;   // steps x 5 x dim
    long rhs_evals_ = 0;
};

/// Integrates y' = rhs(t, y) from a to b (b < a runs backwards). Steps are
/// forced to land exactly on every breakpoint strictly inside the span.
/// Throws IntegrationError on step-size underflow or when max_steps is hit.
OdeSolution integrate(const OdeRhs& rhs, double a, double b, std::vector<double> y0,
                      const IntegratorSettings& settings = {},
                      std::span<const double> breakpoints = {});

}  // namespace rephase::numerics
