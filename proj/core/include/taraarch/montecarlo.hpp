#pragma once

// Replication harness: simulate from a known spec, re-estimate, and summarise the
// sampling distribution of the estimates (bias, RMSE, covariance of sqrt(n)-scaled
// errors, interval coverage, normality).

#include "taraarch/estimation.hpp"
#include "taraarch/fit_report.hpp"
#include "taraarch/model.hpp"
#include "taraarch/search.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace taraarch {

enum class EstimatorKind { concentrated, full_symmetric };

[[nodiscard]] const char* to_string(EstimatorKind kind) noexcept;
[[nodiscard]] EstimatorKind estimator_from_string(const std::string& name);

/// Data-independent description of a search grid; thresholds come from quantiles of
/// each simulated series.
struct SearchPlan {
    std::vector<std::size_t> delays;
    std::size_t max_regimes = 2;
    bool include_single_regime = false;
    double min_regime_fraction = 0.1;
    double quantile_lo = 0.10;
    double quantile_hi = 0.90;
    double quantile_step = 0.025;
};

struct ExperimentPlan {
    ModelSpec true_spec;
    std::vector<std::size_t> sample_sizes;
    std::size_t replicates = 1;
    std::uint64_t base_seed = 0;
    EstimatorKind estimator = EstimatorKind::concentrated;
    VarianceForm variance_form = VarianceForm::asymmetric;
    std::optional<SearchPlan> search;
    std::size_t burn_in = 500;
    /// Experiments with a larger non-convergence share at any n are flagged failed.
    double max_nonconvergence = 0.2;

    void validate() const;
    /// Form actually estimated (full_symmetric always fits the symmetric model).
    [[nodiscard]] VarianceForm fitted_form() const noexcept {
        return estimator == EstimatorKind::full_symmetric ? VarianceForm::symmetric : variance_form;
    }
};

struct ExperimentRow {
    std::size_t n = 0;
    std::size_t r = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    Eigen::VectorXd estimates;
    Eigen::VectorXd std_errors;
    Eigen::MatrixXd covariance;
    // Search experiments only.
    std::size_t selected_delay = 0;
    std::vector<double> selected_thresholds;
};

struct CellSummary {
    std::size_t n = 0;
    std::size_t attempted = 0;
    std::size_t converged = 0;
    double nonconvergence_rate = 0.0;
    Eigen::VectorXd bias;
    Eigen::VectorXd rmse;
    Eigen::VectorXd variance;          ///< sample variance of the estimates
    Eigen::VectorXd coverage;          ///< share of nominal 95% intervals containing the truth
    Eigen::MatrixXd empirical_cov;     ///< sample covariance of sqrt(n) (estimate - truth)
    Eigen::MatrixXd mean_sandwich;     ///< mean of n * sandwich covariance
    // Search experiments only.
    std::size_t delay_mode = 0;
    double delay_hit_rate = 0.0;
    double regime_hit_rate = 0.0;
    double median_threshold_error = 0.0;
};

struct ExperimentResult {
    ExperimentPlan plan;
    std::vector<std::string> param_names;
    Eigen::VectorXd truth;
    std::vector<ExperimentRow> rows;  ///< ordered by (n, r)
    std::vector<CellSummary> cells;   ///< one per sample size
    bool failed = false;

    [[nodiscard]] bool is_search() const noexcept { return plan.search.has_value(); }
};

/// Runs replicate r at size n on the series simulated with derive_seed(base_seed, n, r).
/// Output is identical for any worker count. threads = 0 uses the hardware concurrency.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentPlan& plan, std::size_t threads = 0);

/// Summaries recomputed from raw rows.
[[nodiscard]] std::vector<CellSummary> summarize(const ExperimentPlan& plan, const Eigen::VectorXd& truth,
                                                 const std::vector<ExperimentRow>& rows);

/// True parameter vector in the estimator's layout.
[[nodiscard]] Eigen::VectorXd true_parameters(const ExperimentPlan& plan);

/// Largest absolute difference between stored and recomputed summaries.
[[nodiscard]] double summary_discrepancy(const ExperimentResult& result);

/// Empirical variances non-increasing in n up to `slack` (relative), per coordinate.
[[nodiscard]] bool variances_monotone(const ExperimentResult& result, double slack = 0.05);

struct EfficiencyCell {
    std::size_t n = 0;
    std::size_t paired = 0;
    std::vector<std::string> param_names;
    Eigen::VectorXd var_concentrated;  ///< var of sqrt(n)(estimate - truth)
    Eigen::VectorXd var_full;
    Eigen::VectorXd se_concentrated;   ///< bootstrap standard error of the variance
    Eigen::VectorXd se_full;
    Eigen::VectorXd ratio;             ///< concentrated / full
    bool theta_ok = false;             ///< every theta ratio >= 1 - slack
    bool alpha_ok = false;             ///< every variance-block ratio within [1 - slack, 1 + slack]
};

struct EfficiencyReport {
    std::vector<EfficiencyCell> cells;
    bool ok = false;
};

/// Compares two finished experiments on the same datasets, pairing replicates that
/// converged in both. Throws std::invalid_argument when truths, sizes, seeds or
/// parameter layouts differ, or the truth is not symmetric.
[[nodiscard]] EfficiencyReport compare_efficiency(const ExperimentResult& concentrated,
                                                  const ExperimentResult& full, double slack = 0.10,
                                                  std::size_t bootstrap = 200);

/// Runs both plans and compares them.
[[nodiscard]] EfficiencyReport efficiency_comparison(const ExperimentPlan& concentrated,
                                                     const ExperimentPlan& full, std::size_t threads = 0,
                                                     double slack = 0.10);

struct NormalityCell {
    std::size_t n = 0;
    std::size_t used = 0;
    Eigen::VectorXd skewness;         ///< of sqrt(n) (estimate - truth); scale free
    Eigen::VectorXd excess_kurtosis;  ///< same errors as skewness
    Eigen::VectorXd anderson_darling; ///< of studentized errors (estimate - truth) / se against N(0, 1)
    double ad_pass_share = 0.0;       ///< share of coordinates with A^2 below the 1% point
    Eigen::MatrixXd cov_rel_error;    ///< |empirical - mean sandwich| / sqrt(diag * diag)
    double max_cov_rel_error = 0.0;
    bool skewness_ok = false;         ///< every |skewness| < 0.2
    bool ad_ok = false;               ///< ad_pass_share >= 0.95
    bool cov_ok = false;              ///< max_cov_rel_error <= 0.25
};

struct NormalityReport {
    std::vector<NormalityCell> cells;
    [[nodiscard]] bool ok() const noexcept;
};

/// Per-coordinate normality checks on each sample size. Requires >= 100 usable rows.
[[nodiscard]] NormalityReport normality_diagnostics(const ExperimentResult& result);

}  // namespace taraarch
