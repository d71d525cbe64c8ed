#pragma once

#include "taraarch/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace taraarch {

/// Which variance coefficients are estimated.
enum class VarianceForm {
    asymmetric,  ///< alpha_0, alpha_i and beta_i
    symmetric,   ///< beta_i pinned to 0
    constant,    ///< alpha_i and beta_i pinned to 0
};

[[nodiscard]] const char* to_string(VarianceForm form) noexcept;
[[nodiscard]] VarianceForm variance_form_from_string(const std::string& name);

/// Names of the free parameters in estimation order: phi[j][k] regime-major, then
/// alpha0, alpha[i], beta[i] as allowed by `form`.
[[nodiscard]] std::vector<std::string> parameter_names(std::size_t regimes, std::size_t p, std::size_t q,
                                                       VarianceForm form);

/// Free parameters of `spec` in parameter_names order.
[[nodiscard]] Eigen::VectorXd pack_parameters(const ModelSpec& spec, VarianceForm form);

/// Inverse of pack_parameters; pinned coefficients are zero.
[[nodiscard]] ModelSpec unpack_parameters(const Eigen::VectorXd& values, const ThresholdPartition& partition,
                                          std::size_t p, std::size_t q, VarianceForm form);

struct FitReport {
    std::string estimator;  ///< "concentrated" or "full_symmetric"
    ModelSpec spec;
    VarianceForm variance_form = VarianceForm::asymmetric;
    std::vector<std::string> param_names;
    Eigen::VectorXd estimates;
    Eigen::VectorXd std_errors;
    Eigen::MatrixXd info_matrix;  ///< per-observation information, symmetric
    Eigen::MatrixXd covariance;   ///< sandwich covariance of the estimates
    double qll = 0.0;
    std::size_t observations = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;

    [[nodiscard]] bool has_inference() const noexcept { return std_errors.size() == estimates.size(); }
};

}  // namespace taraarch
