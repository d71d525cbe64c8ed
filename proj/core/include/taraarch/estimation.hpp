#pragma once

// Concentrated quasi-maximum-likelihood estimation.
//
// The variance h_t depends on the mean parameters only through |eps_{t-i}|, so the
// likelihood is not differentiable in phi. The estimator therefore alternates two
// concentrated problems:
//
//   theta step: with alpha fixed, solve for each regime j and k = 0..p
//       sum_t eps_t(theta) / h_t * x_{t-k} 1(x_{t-d} in R_j) = 0      (x_{t-0} := 1)
//     by iteratively reweighted least squares, h_t held fixed within a pass and
//     refreshed between passes;
//   alpha step: with residuals fixed, maximise the Gaussian quasi-likelihood over
//     (alpha_0, alpha_i, beta_i), which is smooth in those coefficients.
//
// Lag terms before the first conditioned observation are filled with
// (alpha_i^2 + beta_i^2) * mean(eps^2).

#include "taraarch/fit_report.hpp"
#include "taraarch/model.hpp"
#include "taraarch/optimize.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace taraarch {

struct FitOptions {
    VarianceForm variance_form = VarianceForm::asymmetric;
    int max_outer_iterations = 200;
    double outer_relative_tol = 1e-9;
    int max_irls_passes = 500;
    double irls_tol = 1e-10;
    BfgsOptions alpha_optimizer{};
    bool compute_information = true;
    /// First conditioned index (0-based); 0 means max(p, q, d). Used to give every
    /// candidate in a search the same likelihood sample.
    std::size_t start = 0;
};

/// One term of the quasi-log-likelihood: -(log h + eps^2 / h) / 2.
[[nodiscard]] double qll_term(double eps, double h);

/// -1/2 sum_{t>m} (log h_t + eps_t^2 / h_t), m = max(p, q, d) unless `start` is given.
[[nodiscard]] double gaussian_qll(const ModelSpec& spec, const TimeSeries& series, std::size_t start = 0);

[[nodiscard]] TarParams theta_step(const TimeSeries& series, const ThresholdPartition& partition,
                                   const AarchParams& aarch, const TarParams& theta_init,
                                   const FitOptions& options = {});

[[nodiscard]] AarchParams alpha_step(const TimeSeries& series, const ThresholdPartition& partition,
                                     const TarParams& tar, const AarchParams& aarch_init,
                                     const FitOptions& options = {});

/// Alternates theta and alpha steps until the relative change in qll falls below
/// options.outer_relative_tol. Throws BestIterateError<FitReport> on non-convergence.
[[nodiscard]] FitReport fit_alternating(const TimeSeries& series, const ThresholdPartition& partition,
                                        std::size_t p, std::size_t q,
                                        const std::optional<ModelSpec>& init = std::nullopt,
                                        const FitOptions& options = {});

/// Left-hand sides of the theta-step estimating equations at `spec`, regime-major.
[[nodiscard]] Eigen::VectorXd concentrated_equations(const ModelSpec& spec, const TimeSeries& series,
                                                     std::size_t start = 0);

/// Analytic gradient of gaussian_qll with respect to (alpha0, alpha_i, beta_i) as
/// allowed by `form`.
[[nodiscard]] Eigen::VectorXd alpha_score(const ModelSpec& spec, const TimeSeries& series,
                                          VarianceForm form = VarianceForm::asymmetric, std::size_t start = 0);

struct InformationEstimate {
    std::vector<std::string> param_names;
    Eigen::MatrixXd score_outer;   ///< J: mean outer product of per-observation estimating functions
    Eigen::MatrixXd jacobian;      ///< H: derivative of the mean estimating function
    Eigen::MatrixXd info;          ///< symmetric inverse of n * sandwich_cov
    Eigen::MatrixXd sandwich_cov;  ///< H^{-1} J H^{-T} / n
    std::size_t observations = 0;
};

/// Sandwich covariance of the concentrated estimator at `spec`. The theta block of H is
/// analytic with h held fixed, the alpha block is the analytic Hessian, cross blocks use
/// central differences with step 1e-5 (1 + |value|). Observations with |eps_t| < 1e-8
/// are left out of the sums. Throws IdentificationError when H is singular.
[[nodiscard]] InformationEstimate estimate_information(const TimeSeries& series, const ModelSpec& spec,
                                                       VarianceForm form = VarianceForm::asymmetric,
                                                       std::size_t start = 0);

}  // namespace taraarch
