#include "taraarch/json_io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace taraarch {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double as_number(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

Json vec(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

Json vec(std::span<const double> v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

Json mat(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::VectorXd to_vec(const Json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(j[i]);
    return v;
}

std::vector<double> to_std(const Json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(as_number(x));
    return v;
}

Eigen::MatrixXd to_mat(const Json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols) throw std::invalid_argument("ragged matrix in JSON");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = as_number(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

const Json& field(const Json& doc, const char* name) {
    if (!doc.is_object() || !doc.contains(name))
        throw std::invalid_argument(std::string("JSON document lacks field '") + name + "'");
    return doc.at(name);
}

Json partition_json(const ThresholdPartition& p) {
    return Json{{"delay", p.delay()}, {"thresholds", vec(p.thresholds())}};
}

ThresholdPartition partition_from(const Json& doc) {
    return {field(doc, "delay").get<std::size_t>(), to_std(field(doc, "thresholds"))};
}

}  // namespace

Json spec_to_json(const ModelSpec& spec) {
    return Json{{"p", spec.p()},
                {"q", spec.q()},
                {"delay", spec.partition().delay()},
                {"thresholds", vec(spec.partition().thresholds())},
                {"tar", mat(spec.tar().coefficients())},
                {"alpha0", spec.aarch().alpha0()},
                {"alphas", vec(spec.aarch().alphas())},
                {"betas", vec(spec.aarch().betas())}};
}

ModelSpec spec_from_json(const Json& doc) {
    try {
        const auto p = field(doc, "p").get<std::size_t>();
        const auto q = field(doc, "q").get<std::size_t>();
        ThresholdPartition partition = partition_from(doc);
        Eigen::MatrixXd tar = to_mat(field(doc, "tar"));
        if (static_cast<std::size_t>(tar.cols()) != p + 1)
            throw std::invalid_argument("spec: tar rows must have p + 1 = " + std::to_string(p + 1) + " entries");
        auto alphas = to_std(field(doc, "alphas"));
        auto betas = doc.contains("betas") ? to_std(doc.at("betas")) : std::vector<double>(alphas.size(), 0.0);
        if (alphas.size() != q || betas.size() != q)
            throw std::invalid_argument("spec: alphas and betas must have q = " + std::to_string(q) + " entries");
        return {std::move(partition), TarParams(std::move(tar)),
                AarchParams(field(doc, "alpha0").get<double>(), std::move(alphas), std::move(betas))};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("spec: ") + e.what());
    }
}

Json fit_report_to_json(const FitReport& r) {
    return Json{{"estimator", r.estimator},
                {"variance_form", to_string(r.variance_form)},
                {"param_names", r.param_names},
                {"params", vec(r.estimates)},
                {"std_errors", vec(r.std_errors)},
                {"info_matrix", mat(r.info_matrix)},
                {"covariance", mat(r.covariance)},
                {"qll", number(r.qll)},
                {"observations", r.observations},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"trace", vec(r.trace)},
                {"partition", partition_json(r.spec.partition())},
                {"spec", spec_to_json(r.spec)}};
}

FitReport fit_report_from_json(const Json& doc) {
    try {
        FitReport r{.estimator = field(doc, "estimator").get<std::string>(),
                    .spec = spec_from_json(field(doc, "spec")),
                    .variance_form = variance_form_from_string(field(doc, "variance_form").get<std::string>()),
                    .param_names = field(doc, "param_names").get<std::vector<std::string>>(),
                    .estimates = to_vec(field(doc, "params")),
                    .std_errors = to_vec(field(doc, "std_errors")),
                    .info_matrix = to_mat(field(doc, "info_matrix")),
                    .covariance = to_mat(field(doc, "covariance")),
                    .qll = as_number(field(doc, "qll")),
                    .observations = field(doc, "observations").get<std::size_t>(),
                    .iterations = field(doc, "iterations").get<int>(),
                    .converged = field(doc, "converged").get<bool>(),
                    .trace = to_std(field(doc, "trace"))};
        if (!(partition_from(field(doc, "partition")) == r.spec.partition()))
            throw std::invalid_argument("fit report: partition disagrees with spec");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("fit report: ") + e.what());
    }
}

Json search_to_json(const SearchResult& result) {
    Json candidates = Json::array();
    for (const auto& c : result.candidates) {
        Json row{{"partition", partition_json(c.partition)}, {"evaluated", c.evaluated}};
        if (c.evaluated) {
            row["qll"] = number(c.qll);
            row["criterion"] = number(c.criterion);
            row["parameters"] = c.parameters;
        } else {
            row["note"] = c.note;
        }
        candidates.push_back(std::move(row));
    }
    return Json{{"selected", partition_json(result.partition)}, {"candidates", std::move(candidates)}};
}

Json plan_to_json(const ExperimentPlan& plan) {
    Json doc{{"true_spec", spec_to_json(plan.true_spec)},
             {"sample_sizes", plan.sample_sizes},
             {"replicates", plan.replicates},
             {"base_seed", plan.base_seed},
             {"estimator", to_string(plan.estimator)},
             {"variance_form", to_string(plan.variance_form)},
             {"burn_in", plan.burn_in},
             {"max_nonconvergence", plan.max_nonconvergence}};
    if (plan.search) {
        const auto& s = *plan.search;
        doc["search"] = Json{{"delays", s.delays},
                             {"max_regimes", s.max_regimes},
                             {"include_single_regime", s.include_single_regime},
                             {"min_regime_fraction", s.min_regime_fraction},
                             {"quantile_lo", s.quantile_lo},
                             {"quantile_hi", s.quantile_hi},
                             {"quantile_step", s.quantile_step}};
    } else {
        doc["search"] = nullptr;
    }
    return doc;
}

ExperimentPlan plan_from_json(const Json& doc) {
    try {
        ExperimentPlan plan{.true_spec = spec_from_json(field(doc, "true_spec")),
                            .sample_sizes = field(doc, "sample_sizes").get<std::vector<std::size_t>>()};
        plan.replicates = doc.value("replicates", plan.replicates);
        plan.base_seed = doc.value("base_seed", plan.base_seed);
        if (doc.contains("estimator")) plan.estimator = estimator_from_string(doc.at("estimator").get<std::string>());
        if (doc.contains("variance_form"))
            plan.variance_form = variance_form_from_string(doc.at("variance_form").get<std::string>());
        plan.burn_in = doc.value("burn_in", plan.burn_in);
        plan.max_nonconvergence = doc.value("max_nonconvergence", plan.max_nonconvergence);
        if (doc.contains("search") && !doc.at("search").is_null()) {
            const auto& s = doc.at("search");
            SearchPlan sp{.delays = field(s, "delays").get<std::vector<std::size_t>>()};
            sp.max_regimes = s.value("max_regimes", sp.max_regimes);
            sp.include_single_regime = s.value("include_single_regime", sp.include_single_regime);
            sp.min_regime_fraction = s.value("min_regime_fraction", sp.min_regime_fraction);
            sp.quantile_lo = s.value("quantile_lo", sp.quantile_lo);
            sp.quantile_hi = s.value("quantile_hi", sp.quantile_hi);
            sp.quantile_step = s.value("quantile_step", sp.quantile_step);
            plan.search = std::move(sp);
        }
        plan.validate();
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("plan: ") + e.what());
    }
}

Json summary_to_json(const ExperimentResult& result) {
    Json cells = Json::array();
    for (const auto& c : result.cells) {
        Json cell{{"n", c.n},
                  {"attempted", c.attempted},
                  {"converged", c.converged},
                  {"nonconvergence_rate", c.nonconvergence_rate}};
        if (result.is_search()) {
            cell["delay_mode"] = c.delay_mode;
            cell["delay_hit_rate"] = c.delay_hit_rate;
            cell["regime_hit_rate"] = c.regime_hit_rate;
            cell["median_threshold_error"] = number(c.median_threshold_error);
        } else {
            cell["bias"] = vec(c.bias);
            cell["rmse"] = vec(c.rmse);
            cell["variance"] = vec(c.variance);
            cell["coverage"] = vec(c.coverage);
            cell["empirical_cov"] = mat(c.empirical_cov);
            cell["mean_sandwich"] = mat(c.mean_sandwich);
        }
        cells.push_back(std::move(cell));
    }
    return Json{{"plan", plan_to_json(result.plan)},
                {"param_names", result.param_names},
                {"truth", vec(result.truth)},
                {"failed", result.failed},
                {"cells", std::move(cells)}};
}

std::vector<CellSummary> cells_from_json(const Json& doc) {
    std::vector<CellSummary> out;
    try {
        for (const auto& j : field(doc, "cells")) {
            CellSummary c{.n = field(j, "n").get<std::size_t>(),
                          .attempted = field(j, "attempted").get<std::size_t>(),
                          .converged = field(j, "converged").get<std::size_t>(),
                          .nonconvergence_rate = field(j, "nonconvergence_rate").get<double>()};
            if (j.contains("delay_mode")) {
                c.delay_mode = j.at("delay_mode").get<std::size_t>();
                c.delay_hit_rate = j.at("delay_hit_rate").get<double>();
                c.regime_hit_rate = j.at("regime_hit_rate").get<double>();
                c.median_threshold_error = as_number(j.at("median_threshold_error"));
            } else {
                c.bias = to_vec(field(j, "bias"));
                c.rmse = to_vec(field(j, "rmse"));
                c.variance = to_vec(field(j, "variance"));
                c.coverage = to_vec(field(j, "coverage"));
                c.empirical_cov = to_mat(field(j, "empirical_cov"));
                c.mean_sandwich = to_mat(field(j, "mean_sandwich"));
            }
            out.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("summary: ") + e.what());
    }
    return out;
}

Json efficiency_to_json(const EfficiencyReport& report) {
    Json cells = Json::array();
    for (const auto& c : report.cells) {
        cells.push_back(Json{{"n", c.n},
                             {"paired", c.paired},
                             {"param_names", c.param_names},
                             {"var_concentrated", vec(c.var_concentrated)},
                             {"var_full", vec(c.var_full)},
                             {"se_concentrated", vec(c.se_concentrated)},
                             {"se_full", vec(c.se_full)},
                             {"ratio", vec(c.ratio)},
                             {"theta_ok", c.theta_ok},
                             {"alpha_ok", c.alpha_ok}});
    }
    return Json{{"ok", report.ok}, {"cells", std::move(cells)}};
}

Json normality_to_json(const NormalityReport& report) {
    Json cells = Json::array();
    for (const auto& c : report.cells) {
        cells.push_back(Json{{"n", c.n},
                             {"used", c.used},
                             {"skewness", vec(c.skewness)},
                             {"excess_kurtosis", vec(c.excess_kurtosis)},
                             {"anderson_darling", vec(c.anderson_darling)},
                             {"ad_pass_share", c.ad_pass_share},
                             {"max_cov_rel_error", number(c.max_cov_rel_error)},
                             {"skewness_ok", c.skewness_ok},
                             {"ad_ok", c.ad_ok},
                             {"cov_ok", c.cov_ok}});
    }
    return Json{{"ok", report.ok()}, {"cells", std::move(cells)}};
}

}  // namespace taraarch
