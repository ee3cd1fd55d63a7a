#pragma once

namespace rephase::numerics {

struct IntegratorSettings {
    double rel_tol = 1e-13;
    double abs_tol = 1e-13;
    long max_steps = 2'000'000;
    /// Zero picks a starting step from the local derivative scale.
    double initial_step = 0.0;
};

struct RootSettings {
    double residual_tol = 1e-11;
    int max_iters = 50;
    /// Initial trust radius as a fraction of the scaled norm of the seed.
    double initial_trust_factor = 0.01;
};

struct QuadSettings {
    /// Target |error| <= tol * max(1, |result|).
    double tol = 1e-13;
    int max_intervals = 4000;
};

}  // namespace rephase::numerics
