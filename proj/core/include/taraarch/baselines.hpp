#pragma once

// Reference volatility recursions, the printed threshold models for the lynx and
// sunspot series, Black-Scholes pricing and the joint quasi-likelihood fit of the
// symmetric TAR-ARCH model.

#include "taraarch/estimation.hpp"
#include "taraarch/fit_report.hpp"
#include "taraarch/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace taraarch {

/// h_t = alpha0 + sum_i alpha_i eps_{t-i}^2, presample eps = 0.
[[nodiscard]] std::vector<double> arch_variance(double alpha0, std::span<const double> alphas,
                                                std::span<const double> residuals);

struct GarchParams {
    double alpha0 = 0.0;
    std::vector<double> alphas;  ///< on eps_{t-i}^2
    std::vector<double> betas;   ///< on h_{t-i}

    void validate() const;
    /// sum(alpha) + sum(beta) < 1
    [[nodiscard]] bool covariance_stationary() const noexcept;
};

/// h_t = alpha0 + sum alpha_i eps_{t-i}^2 + sum beta_i h_{t-i}; presample eps = 0 and
/// presample h = presample_h.
[[nodiscard]] std::vector<double> garch_variance(const GarchParams& params, std::span<const double> residuals,
                                                 double presample_h);

struct EgarchParams {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double omega = 0.0;
    double lambda = 0.0;

    [[nodiscard]] bool stationary() const noexcept;
};

/// g(x) = omega x + lambda (|x| - sqrt(2/pi)).
[[nodiscard]] double egarch_news(const EgarchParams& params, double x);

/// log h_{t+1} = gamma0 + gamma1 log h_t + g(z_t), starting from log h_0 = presample_logh.
/// Element t of the result is the log-variance following shock t.
[[nodiscard]] std::vector<double> egarch_log_variance(const EgarchParams& params,
                                                      std::span<const double> standardized_shocks,
                                                      double presample_logh);

struct CannedSpec {
    std::string name;
    std::string source;
    ThresholdPartition partition;
    TarParams tar;
    /// Innovation standard deviation per regime when printed; empty otherwise.
    std::vector<double> noise_sd;

    /// TAR-AARCH spec with q = 1 and zero ARCH coefficients. alpha0 defaults to the
    /// first regime's printed noise variance.
    [[nodiscard]] ModelSpec model_spec(std::optional<double> alpha0 = std::nullopt) const;
};

[[nodiscard]] std::vector<CannedSpec> canned_specs();
[[nodiscard]] std::optional<CannedSpec> find_canned_spec(std::string_view name);

/// European call: S Phi(d1) - K exp(-r tau) Phi(d1 - sigma sqrt(tau)),
/// d1 = (ln(S/K) + (r + sigma^2/2) tau) / (sigma sqrt(tau)).
[[nodiscard]] double black_scholes_price(double spot, double strike, double rate, double sigma, double tau);

struct FullQmleOptions {
    BfgsOptions optimizer{};
    bool compute_information = true;
    std::size_t start = 0;
};

/// Joint Gaussian QML fit of TAR mean and symmetric ARCH(q) variance
/// h_t = a0 + sum a_i eps_{t-i}^2 with analytic gradients and log-positivity
/// transforms on a0 and a_i. The report is expressed in TAR-AARCH form
/// (alpha_i = sqrt(a_i), beta_i = 0) with VarianceForm::symmetric.
/// Throws BestIterateError<FitReport> on non-convergence.
[[nodiscard]] FitReport tar_arch_full_qmle(const TimeSeries& series, const ThresholdPartition& partition,
                                           std::size_t p, std::size_t q, const FullQmleOptions& options = {});

/// Mean gradient of the quasi-likelihood over (theta, a0, a_i) in ARCH parameters.
[[nodiscard]] Eigen::VectorXd full_qmle_score(const ModelSpec& spec, const TimeSeries& series,
                                              std::size_t start = 0);

}  // namespace taraarch
