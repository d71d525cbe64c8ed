#pragma once

// JSON documents for specs, fit reports, experiment plans and experiment summaries.
// Doubles are written by nlohmann::json in shortest round-trip form, so a value read
// back is bit-identical. NaN is written as null and read back as NaN.

#include "taraarch/fit_report.hpp"
#include "taraarch/model.hpp"
#include "taraarch/montecarlo.hpp"
#include "taraarch/search.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace taraarch {

using Json = nlohmann::ordered_json;

/// {p, q, delay, thresholds[], tar[][], alpha0, alphas[], betas[]}
[[nodiscard]] Json spec_to_json(const ModelSpec& spec);
/// Throws std::invalid_argument on missing fields or inconsistent shapes.
[[nodiscard]] ModelSpec spec_from_json(const Json& doc);

/// {estimator, variance_form, param_names, params, std_errors, info_matrix, covariance,
///  qll, observations, iterations, converged, trace, partition, spec}
[[nodiscard]] Json fit_report_to_json(const FitReport& report);
[[nodiscard]] FitReport fit_report_from_json(const Json& doc);

/// Per-candidate table of a search.
[[nodiscard]] Json search_to_json(const SearchResult& result);

[[nodiscard]] Json plan_to_json(const ExperimentPlan& plan);
/// Every default is materialized in plan_to_json; plan_from_json accepts omissions.
[[nodiscard]] ExperimentPlan plan_from_json(const Json& doc);

/// {plan, param_names, truth, failed, cells[]}
[[nodiscard]] Json summary_to_json(const ExperimentResult& result);
[[nodiscard]] std::vector<CellSummary> cells_from_json(const Json& doc);

[[nodiscard]] Json efficiency_to_json(const EfficiencyReport& report);
[[nodiscard]] Json normality_to_json(const NormalityReport& report);

}  // namespace taraarch
