#include "taraarch/fit_report.hpp"

#include <stdexcept>

namespace taraarch {

const char* to_string(VarianceForm form) noexcept {
    switch (form) {
        case VarianceForm::asymmetric: return "asymmetric";
        case VarianceForm::symmetric: return "symmetric";
        case VarianceForm::constant: return "constant";
    }
    return "asymmetric";
}

VarianceForm variance_form_from_string(const std::string& name) {
    if (name == "asymmetric") return VarianceForm::asymmetric;
    if (name == "symmetric") return VarianceForm::symmetric;
    if (name == "constant") return VarianceForm::constant;
    throw std::invalid_argument("unknown variance form '" + name + "' (asymmetric|symmetric|constant)");
}

std::vector<std::string> parameter_names(std::size_t regimes, std::size_t p, std::size_t q, VarianceForm form) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < regimes; ++j)
        for (std::size_t k = 0; k <= p; ++k) names.push_back("phi[" + std::to_string(j) + "][" + std::to_string(k) + "]");
    names.emplace_back("alpha0");
    if (form != VarianceForm::constant)
        for (std::size_t i = 1; i <= q; ++i) names.push_back("alpha[" + std::to_string(i) + "]");
    if (form == VarianceForm::asymmetric)
        for (std::size_t i = 1; i <= q; ++i) names.push_back("beta[" + std::to_string(i) + "]");
    return names;
}

Eigen::VectorXd pack_parameters(const ModelSpec& spec, VarianceForm form) {
    const auto names = parameter_names(spec.partition().regimes(), spec.p(), spec.q(), form);
    Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
    Eigen::Index at = 0;
    const auto& c = spec.tar().coefficients();
    for (Eigen::Index j = 0; j < c.rows(); ++j)
        for (Eigen::Index k = 0; k < c.cols(); ++k) v(at++) = c(j, k);
    v(at++) = spec.aarch().alpha0();
    if (form != VarianceForm::constant)
        for (double a : spec.aarch().alphas()) v(at++) = a;
    if (form == VarianceForm::asymmetric)
        for (double b : spec.aarch().betas()) v(at++) = b;
    return v;
}

ModelSpec unpack_parameters(const Eigen::VectorXd& values, const ThresholdPartition& partition, std::size_t p,
                            std::size_t q, VarianceForm form) {
    const auto l = static_cast<Eigen::Index>(partition.regimes());
    const auto w = static_cast<Eigen::Index>(p + 1);
    if (values.size() != static_cast<Eigen::Index>(parameter_names(partition.regimes(), p, q, form).size()))
        throw std::invalid_argument("unpack_parameters: wrong parameter count");
    Eigen::MatrixXd c(l, w);
    Eigen::Index at = 0;
    for (Eigen::Index j = 0; j < l; ++j)
        for (Eigen::Index k = 0; k < w; ++k) c(j, k) = values(at++);
    const double alpha0 = values(at++);
    std::vector<double> alphas(q, 0.0);
    std::vector<double> betas(q, 0.0);
    if (form != VarianceForm::constant)
        for (auto& a : alphas) a = values(at++);
    if (form == VarianceForm::asymmetric)
        for (auto& b : betas) b = values(at++);
    return {partition, TarParams(std::move(c)), AarchParams(alpha0, std::move(alphas), std::move(betas))};
}

}  // namespace taraarch
