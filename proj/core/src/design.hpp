#pragma once

// Regression layout shared by the concentrated and the full quasi-likelihood fits.

#include "taraarch/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace taraarch::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Observations t = start..n-1 with their regressors (1, x_{t-1}, ..., x_{t-p}) and the
/// regime selected by x_{t-d}.
struct Design {
    std::size_t start = 0;
    std::size_t p = 0;
    std::size_t q = 0;
    std::size_t regimes = 1;
    std::vector<double> y;
    RowMatrix z;
    std::vector<std::size_t> regime;
    std::vector<std::size_t> counts;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    [[nodiscard]] std::size_t width() const noexcept { return p + 1; }
    [[nodiscard]] std::size_t theta_size() const noexcept { return regimes * (p + 1); }
};

/// start = 0 means max(p, q, d).
[[nodiscard]] Design make_design(const TimeSeries& series, const ThresholdPartition& partition,
                                 std::size_t p, std::size_t q, std::size_t start = 0);

void compute_residuals(const Design& d, const Eigen::MatrixXd& theta, std::span<double> out);

/// Mean of squared residuals; fills lag terms reaching before the first residual.
[[nodiscard]] double presample_variance(std::span<const double> e);

void compute_variance(const AarchParams& aarch, std::span<const double> e, double presample,
                      std::span<double> out);

/// -1/2 sum (log h + e^2 / h).
[[nodiscard]] double quasi_loglik(std::span<const double> e, std::span<const double> h);

/// Residuals, presample fill and h at (theta, aarch).
struct PathState {
    std::vector<double> e;
    std::vector<double> h;
    double presample = 0.0;
    double qll = 0.0;
};

[[nodiscard]] PathState evaluate(const Design& d, const Eigen::MatrixXd& theta, const AarchParams& aarch);

/// Sum_t e_t z_t 1(regime_t = j) / h_t for every (j, k), regime-major.
[[nodiscard]] Eigen::VectorXd theta_equations(const Design& d, const PathState& s);

}  // namespace taraarch::detail
