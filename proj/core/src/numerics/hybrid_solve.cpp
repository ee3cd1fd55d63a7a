#include "rephase/numerics/hybrid_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rephase/error.hpp"

namespace rephase::numerics {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Dogleg step in scaled variables s = D p for the model ||F + J p||.
Eigen::VectorXd dogleg(const Eigen::MatrixXd& jac, const Eigen::VectorXd& diag,
                       const Eigen::VectorXd& f, double delta) {
    const Eigen::MatrixXd js = jac * diag.cwiseInverse().asDiagonal();
    Eigen::VectorXd s_gn;
    bool gn_ok = false;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(js);
    if (qr.rank() == js.cols()) {
        s_gn = -qr.solve(f);
        gn_ok = s_gn.allFinite();
    }
    if (gn_ok && s_gn.norm() <= delta) return diag.cwiseInverse().asDiagonal() * s_gn;

    const Eigen::VectorXd grad = js.transpose() * f;
    const double gnorm = grad.norm();
    Eigen::VectorXd s;
    if (gnorm == 0.0) {
        s = gn_ok ? Eigen::VectorXd(s_gn * (delta / s_gn.norm())) : Eigen::VectorXd::Zero(f.size());
    } else {
        const double jg = (js * grad).squaredNorm();
        const double alpha = jg > 0.0 ? gnorm * gnorm / jg : delta / gnorm;
        const Eigen::VectorXd s_c = -alpha * grad;
        const double cnorm = s_c.norm();
        if (!gn_ok || cnorm >= delta) {
            s = -(delta / gnorm) * grad;
        } else {
            // Point on the segment s_c -> s_gn at distance delta.
            const Eigen::VectorXd d = s_gn - s_c;
            const double a = d.squaredNorm();
            const double b = 2.0 * s_c.dot(d);
            const double c = cnorm * cnorm - delta * delta;
            const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
            s = s_c + tau * d;
        }
    }
    return diag.cwiseInverse().asDiagonal() * s;
}

HybridResult solve_impl(const VectorFn& residual, const JacobianFn* jacobian,
                        const Eigen::VectorXd& z0, const RootSettings& settings,
                        const Eigen::VectorXd& tolerance_scale) {
    HybridResult out;
    Eigen::VectorXd z = z0;
    Eigen::VectorXd f = residual(z);
    ++out.evaluations;
    out.residual_history.push_back(f.lpNorm<Eigen::Infinity>());
    if (!f.allFinite()) {
        throw NonconvergenceError("hybrid_solve: residual not finite at seed", to_std(z),
                                  to_std(f), 0, out.residual_history);
    }
    const Eigen::Index n = z.size();
    if (tolerance_scale.size() != 0 && tolerance_scale.size() != f.size()) {
        throw DomainError("hybrid_solve: tolerance scale size does not match residual");
    }
    auto converged = [&](const Eigen::VectorXd& r) {
        if (tolerance_scale.size() == 0) return r.lpNorm<Eigen::Infinity>() <= settings.residual_tol;
        return (r.cwiseAbs().array() <= settings.residual_tol * tolerance_scale.array()).all();
    };
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    double delta = 0.0;
    bool first = true;
    int successes = 0;
    int failures = 0;

    auto jac_at = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& fx) {
        ++out.jacobian_evaluations;
        if (jacobian != nullptr) return (*jacobian)(x);
        out.evaluations += static_cast<int>(n);
        return forward_difference_jacobian(residual, x, fx);
    };

    Eigen::MatrixXd jac;
    bool need_jacobian = true;
    while (true) {
        if (converged(f)) break;
        if (out.iterations >= settings.max_iters) {
            throw NonconvergenceError("hybrid_solve: iteration budget exhausted", to_std(z),
                                      to_std(f), out.iterations, out.residual_history);
        }
        if (need_jacobian) {
            jac = jac_at(z, f);
            if (!jac.allFinite()) {
                throw NonconvergenceError("hybrid_solve: Jacobian not finite", to_std(z),
                                          to_std(f), out.iterations, out.residual_history);
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                double cn = jac.col(j).norm();
                if (cn == 0.0) cn = 1.0;
                diag(j) = first ? cn : std::max(diag(j), cn);
            }
            if (first) {
                const double xnorm = diag.cwiseProduct(z).norm();
                delta = settings.initial_trust_factor * xnorm;
                if (delta == 0.0) delta = settings.initial_trust_factor;
            }
            need_jacobian = false;
        }

        const Eigen::VectorXd p = dogleg(jac, diag, f, delta);
        const double pnorm = diag.cwiseProduct(p).norm();
        if (first) {
            delta = std::min(delta, pnorm);
            first = false;
        }
        const Eigen::VectorXd z_trial = z + p;
        ++out.iterations;

        Eigen::VectorXd f_trial;
        bool trial_ok = true;
        try {
            f_trial = residual(z_trial);
            ++out.evaluations;
            trial_ok = f_trial.allFinite();
        } catch (const Error&) {
            ++out.evaluations;
            trial_ok = false;
        }

        const double fnorm = f.norm();
        double ratio = -1.0;
        if (trial_ok) {
            const double fnorm1 = f_trial.norm();
            const double actred = fnorm1 < fnorm ? 1.0 - (fnorm1 / fnorm) * (fnorm1 / fnorm) : -1.0;
            const double prednorm = (f + jac * p).norm();
            const double prered =
                prednorm < fnorm ? 1.0 - (prednorm / fnorm) * (prednorm / fnorm) : 0.0;
            ratio = prered > 0.0 ? actred / prered : (actred > 0.0 ? 1.0 : -1.0);
        }

        if (ratio < 0.1) {
            successes = 0;
            ++failures;
            delta *= 0.5;
        } else {
            failures = 0;
            ++successes;
            if (ratio >= 0.5 || successes > 1) delta = std::max(delta, pnorm / 0.5);
            if (std::abs(ratio - 1.0) <= 0.1) delta = pnorm / 0.5;
        }

        if (ratio >= 1e-4) {
            z = z_trial;
            f = f_trial;
            need_jacobian = true;
            out.residual_history.push_back(f.lpNorm<Eigen::Infinity>());
        }

        const double xnorm = diag.cwiseProduct(z).norm();
        if (delta <= 1e-15 * std::max(xnorm, 1e-300) || failures > 12) {
            throw NonconvergenceError("hybrid_solve: trust region collapsed", to_std(z),
                                      to_std(f), out.iterations, out.residual_history);
        }
    }
    out.z = z;
    out.residual = f;
    return out;
}

}  // namespace

Eigen::MatrixXd forward_difference_jacobian(const VectorFn& residual, const Eigen::VectorXd& z,
                                            const Eigen::VectorXd& fz) {
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    Eigen::MatrixXd jac(fz.size(), z.size());
    Eigen::VectorXd zp = z;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double h = root_eps * std::max(1.0, std::abs(z(j)));
        zp(j) = z(j) + h;
        const double actual = zp(j) - z(j);
        jac.col(j) = (residual(zp) - fz) / actual;
        zp(j) = z(j);
    }
    return jac;
}

HybridResult hybrid_solve(const VectorFn& residual, const JacobianFn& jacobian,
                          const Eigen::VectorXd& z0, const RootSettings& settings,
                          const Eigen::VectorXd& tolerance_scale) {
    return solve_impl(residual, &jacobian, z0, settings, tolerance_scale);
}

HybridResult hybrid_solve(const VectorFn& residual, const Eigen::VectorXd& z0,
                          const RootSettings& settings, const Eigen::VectorXd& tolerance_scale) {
    return solve_impl(residual, nullptr, z0, settings, tolerance_scale);
}

}  // namespace rephase::numerics
