#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rephase/numerics/settings.hpp"

namespace rephase::numerics {

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct HybridResult {
    Eigen::VectorXd z;
    Eigen::VectorXd residual;
    int iterations = 0;        // trial steps taken
    int evaluations = 0;       // residual calls, finite-difference columns included
    int jacobian_evaluations = 0;
    /// Max-norm residual at the seed and at every accepted iterate.
    std::vector<double> residual_history;
};

/// Powell hybrid (dogleg trust-region) root finder for square systems, in the
/// spirit of MINPACK hybrj: variables are scaled by running Jacobian column
/// norms and the initial trust radius is initial_trust_factor times the
/// scaled norm of z0. Without an analytic Jacobian, forward differences with
/// step sqrt(eps)*max(1, |z_i|) are used. A residual evaluation that throws a
/// rephase::Error at a trial point counts as a rejected step.
///
/// Converged when |F_i| <= residual_tol * tolerance_scale_i for every i (an
/// empty scale means all ones). Throws NonconvergenceError when the trust
/// region collapses or max_iters trial steps are spent.
HybridResult hybrid_solve(const VectorFn& residual, const JacobianFn& jacobian,
                          const Eigen::VectorXd& z0, const RootSettings& settings = {},
                          const Eigen::VectorXd& tolerance_scale = {});

/// Same as above with a finite-difference Jacobian.
HybridResult hybrid_solve(const VectorFn& residual, const Eigen::VectorXd& z0,
                          const RootSettings& settings = {},
                          const Eigen::VectorXd& tolerance_scale = {});

/// Forward-difference Jacobian at z given F(z).
Eigen::MatrixXd forward_difference_jacobian(const VectorFn& residual, const Eigen::VectorXd& z,
                                            const Eigen::VectorXd& fz);

}  // namespace rephase::numerics
