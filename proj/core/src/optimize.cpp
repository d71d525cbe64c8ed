#include "taraarch/optimize.hpp"

#include <cmath>
#include <limits>

namespace taraarch {

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options) {
    const Eigen::Index n = x0.size();
    BfgsResult out;
    out.x = std::move(x0);
    out.gradient = Eigen::VectorXd::Zero(n);
    out.value = f(out.x, &out.gradient);
    if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
        out.message = "objective not finite at the starting point";
        return out;
    }

    Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    Eigen::VectorXd trial_grad(n);

    for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
        const double gnorm = out.gradient.lpNorm<Eigen::Infinity>();
        if (gnorm < options.gradient_tol) {
            out.converged = true;
            out.message = "gradient tolerance reached";
            return out;
        }

        Eigen::VectorXd dir = -inv_h * out.gradient;
        double slope = out.gradient.dot(dir);
        if (!(slope < 0.0)) {
            inv_h.setIdentity();
            scaled = false;
            dir = -out.gradient;
            slope = -out.gradient.squaredNorm();
        }

        // Armijo backtracking.
        constexpr double c1 = 1e-4;
        double step = 1.0;
        double trial_value = std::numeric_limits<double>::infinity();
        Eigen::VectorXd trial_x;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, step *= 0.5) {
            trial_x = out.x + step * dir;
            trial_value = f(trial_x, &trial_grad);
            if (std::isfinite(trial_value) && trial_grad.allFinite() &&
                trial_value <= out.value + c1 * step * slope) {
                accepted = true;
                break;
            }
        }
        // Near the optimum c1 * step * slope can vanish in rounding, so an unchanged
        // value would pass the Armijo test forever.
        if (!accepted || !(trial_value < out.value)) {
            out.converged = gnorm < options.stall_gradient_tol;
            out.message = "line search could not decrease the objective";
            return out;
        }

        const Eigen::VectorXd s = trial_x - out.x;
        const Eigen::VectorXd y = trial_grad - out.gradient;
        const double previous = out.value;
        out.x = trial_x;
        out.value = trial_value;
        out.trace.push_back(trial_value);
        out.gradient = trial_grad;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                inv_h *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = inv_h * y;
            inv_h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
                     rho * (hy * s.transpose() + s * hy.transpose());
        }

        const double change = std::abs(previous - out.value);
        if (options.relative_tol > 0.0 && change <= options.relative_tol * std::max(std::abs(out.value), 1e-300) &&
            out.gradient.lpNorm<Eigen::Infinity>() < options.stall_gradient_tol) {
            out.converged = true;
            out.message = "relative objective change below tolerance";
            ++out.iterations;
            return out;
        }
    }
    out.converged = out.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tol;
    out.message = out.converged ? "gradient tolerance reached" : "iteration limit reached";
    return out;
}

}  // namespace taraarch
