#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace taraarch {

/// Objective value at x; writes the gradient into *grad when grad is non-null.
/// Returning a non-finite value marks x as infeasible for the line search.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tol = 1e-8;        ///< max-norm of the gradient
    double relative_tol = 0.0;         ///< relative objective change that counts as a stall; 0 disables
    double stall_gradient_tol = 1e-6;  ///< a stall is accepted as convergence below this gradient norm
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    std::vector<double> trace;  ///< objective after each accepted step
    bool converged = false;
    std::string message;
};

/// Quasi-Newton minimisation with an inverse-Hessian BFGS update and Armijo
/// backtracking. Updates that would break positive definiteness are skipped.
[[nodiscard]] BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace taraarch
