#pragma once

#include "design.hpp"
#include "taraarch/fit_report.hpp"
#include "taraarch/optimize.hpp"

#include <Eigen/Dense>

namespace taraarch::detail {

struct ThetaSolve {
    Eigen::MatrixXd theta;
    int passes = 0;
    bool converged = false;
};

/// IRLS for the theta-step equations; h refreshed from the current theta each pass.
[[nodiscard]] ThetaSolve solve_theta(const Design& d, const AarchParams& aarch, Eigen::MatrixXd theta,
                                     int max_passes, double tol);

struct AlphaSolve {
    AarchParams aarch;
    bool converged = false;
    double gradient_norm = 0.0;
    int iterations = 0;
};

/// Maximises the quasi-likelihood over the variance coefficients with residuals fixed.
/// The result is normalised so that alpha_i >= |beta_i|, which leaves h unchanged.
[[nodiscard]] AlphaSolve solve_alpha(std::span<const double> e, const AarchParams& init, VarianceForm form,
                                     const BfgsOptions& options);

/// Forces pinned coefficients of `aarch` to zero.
[[nodiscard]] AarchParams restrict_form(const AarchParams& aarch, VarianceForm form);

/// Per-lag rewrite of (alpha, beta) into the representative with alpha >= |beta|.
[[nodiscard]] AarchParams canonical_aarch(const AarchParams& aarch);

/// Gradient of sum_t l_t w.r.t. natural (alpha0, alpha_i, beta_i) allowed by `form`.
[[nodiscard]] Eigen::VectorXd alpha_gradient(std::span<const double> e, std::span<const double> h,
                                             double presample, const AarchParams& aarch, VarianceForm form);

[[nodiscard]] std::size_t alpha_size(std::size_t q, VarianceForm form) noexcept;

}  // namespace taraarch::detail
