#pragma once

// Threshold autoregression with asymmetric ARCH errors:
//
//   x_t = sum_j (phi_j0 + sum_k phi_jk x_{t-k}) 1(x_{t-d} in R_j) + eps_t
//   eps_t = z_t sqrt(h_t),  z_t iid N(0,1)
//   h_t = alpha_0 + sum_i (alpha_i |eps_{t-i}| + beta_i eps_{t-i})^2
//
// Regimes are indexed from 0 in this library; regime j here is R_{j+1} in the
// usual one-based notation.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace taraarch {

class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values, std::optional<std::string> origin_label = {});

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] const std::optional<std::string>& origin_label() const noexcept { return label_; }

private:
    std::vector<double> values_;
    std::optional<std::string> label_;
};

/// Regime intervals (-inf, t_1], (t_1, t_2], ..., (t_{l-1}, +inf) selected by x_{t-d}.
class ThresholdPartition {
public:
    ThresholdPartition(std::size_t delay, std::vector<double> thresholds);

    static ThresholdPartition single_regime(std::size_t delay = 1) { return {delay, {}}; }

    [[nodiscard]] std::size_t regimes() const noexcept { return thresholds_.size() + 1; }
    [[nodiscard]] std::size_t delay() const noexcept { return delay_; }
    [[nodiscard]] std::span<const double> thresholds() const noexcept { return thresholds_; }

    /// Zero-based regime containing x. Intervals are closed on the right, so a
    /// value equal to a threshold belongs to the lower regime.
    [[nodiscard]] std::size_t regime_of(double x) const noexcept;

    friend bool operator==(const ThresholdPartition&, const ThresholdPartition&) = default;

private:
    std::size_t delay_;
    std::vector<double> thresholds_;
};

/// Per-regime autoregressive coefficients; row j is (phi_j0, phi_j1, ..., phi_jp).
class TarParams {
public:
    explicit TarParams(Eigen::MatrixXd coefficients);

    static TarParams zeros(std::size_t regimes, std::size_t p) {
        return TarParams(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(regimes),
                                               static_cast<Eigen::Index>(p + 1)));
    }

    [[nodiscard]] std::size_t regimes() const noexcept { return static_cast<std::size_t>(coef_.rows()); }
    [[nodiscard]] std::size_t order() const noexcept { return static_cast<std::size_t>(coef_.cols()) - 1; }
    [[nodiscard]] const Eigen::MatrixXd& coefficients() const noexcept { return coef_; }
    [[nodiscard]] double operator()(std::size_t regime, std::size_t k) const {
        return coef_(static_cast<Eigen::Index>(regime), static_cast<Eigen::Index>(k));
    }

private:
    Eigen::MatrixXd coef_;
};

/// Variance recursion parameters: alpha_0 > 0 and q >= 1 pairs (alpha_i, beta_i).
class AarchParams {
public:
    AarchParams(double alpha0, std::vector<double> alphas, std::vector<double> betas);

    /// alpha_0 only; every lag coefficient zero.
    static AarchParams homoskedastic(double alpha0, std::size_t q = 1) {
        return {alpha0, std::vector<double>(q, 0.0), std::vector<double>(q, 0.0)};
    }

    [[nodiscard]] double alpha0() const noexcept { return alpha0_; }
    [[nodiscard]] std::span<const double> alphas() const noexcept { return alphas_; }
    [[nodiscard]] std::span<const double> betas() const noexcept { return betas_; }
    [[nodiscard]] std::size_t order() const noexcept { return alphas_.size(); }
    [[nodiscard]] bool symmetric() const noexcept;

    /// sum_i (alpha_i^2 + beta_i^2), i.e. E(alpha|z| + beta z)^2 summed over lags for z ~ N(0,1).
    [[nodiscard]] double persistence() const noexcept;

private:
    double alpha0_;
    std::vector<double> alphas_;
    std::vector<double> betas_;
};

struct StationarityReport {
    double variance_persistence = 0.0;  ///< sum_i (alpha_i^2 + beta_i^2)
    double max_abs_ar_sum = 0.0;        ///< max_j sum_{k>=1} |phi_jk|
    bool variance_ok = false;
    bool mean_ok = false;

    [[nodiscard]] bool ok() const noexcept { return variance_ok && mean_ok; }
};

class ModelSpec {
public:
    ModelSpec(ThresholdPartition partition, TarParams tar, AarchParams aarch);

    [[nodiscard]] std::size_t p() const noexcept { return tar_.order(); }
    [[nodiscard]] std::size_t q() const noexcept { return aarch_.order(); }
    [[nodiscard]] const ThresholdPartition& partition() const noexcept { return partition_; }
    [[nodiscard]] const TarParams& tar() const noexcept { return tar_; }
    [[nodiscard]] const AarchParams& aarch() const noexcept { return aarch_; }

    /// max(p, d): history needed to evaluate the conditional mean.
    [[nodiscard]] std::size_t mean_lags() const noexcept;
    /// max(p, q, d): observations conditioned on by the quasi-likelihood.
    [[nodiscard]] std::size_t conditioning_lags() const noexcept;

    [[nodiscard]] ModelSpec with_tar(TarParams tar) const { return {partition_, std::move(tar), aarch_}; }
    [[nodiscard]] ModelSpec with_aarch(AarchParams aarch) const { return {partition_, tar_, std::move(aarch)}; }

private:
    ThresholdPartition partition_;
    TarParams tar_;
    AarchParams aarch_;
};

/// Sufficient-side checks: sum(alpha^2 + beta^2) < 1 and max_j sum_k |phi_jk| < 1.
/// Violations are reported, never thrown.
[[nodiscard]] StationarityReport check_stationarity(const ModelSpec& spec);

/// phi_j0 + sum_k phi_jk x_{t-k} for the regime picked by x_{t-d}. `history` is
/// chronological (history.back() is x_{t-1}) and must hold at least max(p, d) values.
[[nodiscard]] double conditional_mean(const ModelSpec& spec, std::span<const double> history);

/// eps_t = x_t - conditional mean, for t = max(p,d)+1..n (length n - max(p,d)).
[[nodiscard]] std::vector<double> residuals(const ModelSpec& spec, const TimeSeries& series);

/// h_t over a residual sequence. Lag terms that reach before the first residual are
/// replaced by their expectation (alpha_i^2 + beta_i^2) * presample_h; presample_h = 0
/// reproduces zero presample residuals.
[[nodiscard]] std::vector<double> variance_path(const AarchParams& aarch,
                                                std::span<const double> residuals,
                                                double presample_h);

/// (alpha_i |shock| + beta_i shock)^2 for a one-based lag i.
[[nodiscard]] double news_impact(const AarchParams& aarch, double shock, std::size_t lag);

}  // namespace taraarch
