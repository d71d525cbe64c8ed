#include "taraarch/montecarlo.hpp"

#include "concentrated.hpp"
#include "taraarch/baselines.hpp"
#include "taraarch/error.hpp"
#include "taraarch/rng.hpp"
#include "taraarch/simulate.hpp"
#include "taraarch/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace taraarch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

ExperimentRow run_replicate(const ExperimentPlan& plan, std::size_t n, std::size_t r) {
    ExperimentRow row;
    row.n = n;
    row.r = r;
    row.seed = derive_seed(plan.base_seed, n, r);
    const auto& truth = plan.true_spec;
    try {
        const auto path = simulate_path(truth, SimConfig{.n = n, .burn_in = plan.burn_in, .seed = row.seed});
        FitReport fit = [&] {
            if (plan.search) {
                const auto& s = *plan.search;
                const auto grid = SearchGrid::quantile_grid(path.series, s.delays, s.max_regimes, s.include_single_regime,
                                                            s.min_regime_fraction, s.quantile_lo, s.quantile_hi,
                                                            s.quantile_step);
                FitOptions opts;
                opts.variance_form = plan.variance_form;
                opts.compute_information = false;
                auto found = threshold_delay_search(path.series, truth.p(), truth.q(), grid, opts);
                row.selected_delay = found.partition.delay();
                row.selected_thresholds.assign(found.partition.thresholds().begin(), found.partition.thresholds().end());
                return std::move(found.fit);
            }
            if (plan.estimator == EstimatorKind::full_symmetric)
                return tar_arch_full_qmle(path.series, truth.partition(), truth.p(), truth.q());
            FitOptions opts;
            opts.variance_form = plan.variance_form;
            return fit_alternating(path.series, truth.partition(), truth.p(), truth.q(), std::nullopt, opts);
        }();
        row.converged = fit.converged;
        if (!plan.search) {
            row.estimates = fit.estimates;
            row.std_errors = fit.std_errors;
            row.covariance = fit.covariance;
        }
    } catch (const std::exception&) {
        row.converged = false;
    }
    return row;
}

Eigen::VectorXd nan_vector(Eigen::Index k) { return Eigen::VectorXd::Constant(k, kNaN); }

CellSummary summarize_cell(std::size_t n, const Eigen::VectorXd& truth, const std::vector<const ExperimentRow*>& rows,
                           const ExperimentPlan& plan) {
    CellSummary c;
    c.n = n;
    c.attempted = rows.size();
    std::vector<const ExperimentRow*> ok;
    for (const auto* r : rows)
        if (r->converged) ok.push_back(r);
    c.converged = ok.size();
    c.nonconvergence_rate =
        c.attempted == 0 ? 0.0 : static_cast<double>(c.attempted - c.converged) / static_cast<double>(c.attempted);

    if (plan.search) {
        std::map<std::size_t, std::size_t> votes;
        std::vector<double> errors;
        std::size_t regime_hits = 0;
        const auto true_t = plan.true_spec.partition().thresholds();
        for (const auto* r : ok) {
            ++votes[r->selected_delay];
            if (r->selected_thresholds.size() == true_t.size()) {
                ++regime_hits;
                double err = 0.0;
                for (std::size_t i = 0; i < true_t.size(); ++i)
                    err = std::max(err, std::abs(r->selected_thresholds[i] - true_t[i]));
                errors.push_back(err);
            } else {
                errors.push_back(std::numeric_limits<double>::infinity());
            }
        }
        std::size_t best = 0;
        for (const auto& [d, count] : votes)
            if (count > best) {
                best = count;
                c.delay_mode = d;
            }
        const double denom = ok.empty() ? 1.0 : static_cast<double>(ok.size());
        c.delay_hit_rate = static_cast<double>(votes[plan.true_spec.partition().delay()]) / denom;
        c.regime_hit_rate = static_cast<double>(regime_hits) / denom;
        c.median_threshold_error = errors.empty() ? kNaN : stats::median(errors);
        return c;
    }

    const Eigen::Index k = truth.size();
    const double m = static_cast<double>(ok.size());
    if (ok.empty()) {
        c.bias = c.rmse = c.variance = c.coverage = nan_vector(k);
        c.empirical_cov = c.mean_sandwich = Eigen::MatrixXd::Constant(k, k, kNaN);
        return c;
    }
    Eigen::MatrixXd err(static_cast<Eigen::Index>(ok.size()), k);
    c.coverage = Eigen::VectorXd::Zero(k);
    c.mean_sandwich = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < ok.size(); ++i) {
        err.row(static_cast<Eigen::Index>(i)) = (ok[i]->estimates - truth).transpose();
        for (Eigen::Index j = 0; j < k; ++j)
            if (std::abs(ok[i]->estimates(j) - truth(j)) <= kZ975 * ok[i]->std_errors(j)) c.coverage(j) += 1.0;
        c.mean_sandwich += static_cast<double>(n) * ok[i]->covariance;
    }
    c.coverage /= m;
    c.mean_sandwich /= m;
    c.bias = err.colwise().mean().transpose();
    c.rmse = (err.array().square().colwise().sum() / m).sqrt().transpose();
    if (ok.size() >= 2) {
        const Eigen::MatrixXd centered = err.rowwise() - err.colwise().mean();
        const Eigen::MatrixXd cov = centered.transpose() * centered / (m - 1.0);
        c.variance = cov.diagonal();
        c.empirical_cov = static_cast<double>(n) * cov;
    } else {
        c.variance = nan_vector(k);
        c.empirical_cov = Eigen::MatrixXd::Constant(k, k, kNaN);
    }
    return c;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double x = a.data()[i];
        const double y = b.data()[i];
        if (std::isnan(x) && std::isnan(y)) continue;
        if (std::isinf(x) && x == y) continue;
        worst = std::max(worst, std::abs(x - y));
        if (std::isnan(x) != std::isnan(y)) return std::numeric_limits<double>::infinity();
    }
    return worst;
}

}  // namespace

const char* to_string(EstimatorKind kind) noexcept {
    return kind == EstimatorKind::full_symmetric ? "full_symmetric" : "concentrated";
}

EstimatorKind estimator_from_string(const std::string& name) {
    if (name == "concentrated") return EstimatorKind::concentrated;
    if (name == "full_symmetric") return EstimatorKind::full_symmetric;
    throw std::invalid_argument("unknown estimator '" + name + "' (concentrated|full_symmetric)");
}

void ExperimentPlan::validate() const {
    if (replicates < 1) throw std::invalid_argument("ExperimentPlan: replicates must be >= 1");
    if (sample_sizes.empty()) throw std::invalid_argument("ExperimentPlan: no sample sizes");
    for (std::size_t i = 1; i < sample_sizes.size(); ++i)
        if (!(sample_sizes[i - 1] < sample_sizes[i]))
            throw std::invalid_argument("ExperimentPlan: sample sizes must be strictly increasing");
    if (estimator == EstimatorKind::full_symmetric && !true_spec.aarch().symmetric())
        throw std::invalid_argument("ExperimentPlan: full_symmetric requires a truth with beta = 0");
    if (search && search->delays.empty()) throw std::invalid_argument("ExperimentPlan: search needs delays");
    if (search && estimator != EstimatorKind::concentrated)
        throw std::invalid_argument("ExperimentPlan: search experiments use the concentrated estimator");
}

Eigen::VectorXd true_parameters(const ExperimentPlan& plan) {
    const auto& t = plan.true_spec;
    return pack_parameters(t.with_aarch(detail::canonical_aarch(t.aarch())), plan.fitted_form());
}

std::vector<CellSummary> summarize(const ExperimentPlan& plan, const Eigen::VectorXd& truth,
                                   const std::vector<ExperimentRow>& rows) {
    std::vector<CellSummary> cells;
    for (std::size_t n : plan.sample_sizes) {
        std::vector<const ExperimentRow*> mine;
        for (const auto& r : rows)
            if (r.n == n) mine.push_back(&r);
        cells.push_back(summarize_cell(n, truth, mine, plan));
    }
    return cells;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, std::size_t threads) {
    plan.validate();
    ExperimentResult result{.plan = plan,
                            .param_names = parameter_names(plan.true_spec.partition().regimes(), plan.true_spec.p(),
                                                           plan.true_spec.q(), plan.fitted_form()),
                            .truth = true_parameters(plan)};
    const std::size_t total = plan.sample_sizes.size() * plan.replicates;
    result.rows.resize(total);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            const std::size_t n = plan.sample_sizes[i / plan.replicates];
            result.rows[i] = run_replicate(plan, n, i % plan.replicates);
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    result.cells = summarize(plan, result.truth, result.rows);
    for (const auto& c : result.cells)
        if (c.nonconvergence_rate > plan.max_nonconvergence) result.failed = true;
    return result;
}

double summary_discrepancy(const ExperimentResult& result) {
    const auto fresh = summarize(result.plan, result.truth, result.rows);
    if (fresh.size() != result.cells.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
        const auto& a = fresh[i];
        const auto& b = result.cells[i];
        if (a.n != b.n || a.attempted != b.attempted || a.converged != b.converged || a.delay_mode != b.delay_mode)
            return std::numeric_limits<double>::infinity();
        worst = std::max({worst, std::abs(a.nonconvergence_rate - b.nonconvergence_rate),
                          std::abs(a.delay_hit_rate - b.delay_hit_rate), std::abs(a.regime_hit_rate - b.regime_hit_rate)});
        if (!(std::isnan(a.median_threshold_error) && std::isnan(b.median_threshold_error)) &&
            a.median_threshold_error != b.median_threshold_error)
            worst = std::max(worst, std::abs(a.median_threshold_error - b.median_threshold_error));
        if (result.is_search()) continue;
        worst = std::max({worst, max_abs_diff(a.bias, b.bias), max_abs_diff(a.rmse, b.rmse),
                          max_abs_diff(a.variance, b.variance), max_abs_diff(a.coverage, b.coverage),
                          max_abs_diff(a.empirical_cov, b.empirical_cov), max_abs_diff(a.mean_sandwich, b.mean_sandwich)});
    }
    return worst;
}

bool variances_monotone(const ExperimentResult& result, double slack) {
    for (std::size_t i = 1; i < result.cells.size(); ++i) {
        const auto& prev = result.cells[i - 1].variance;
        const auto& cur = result.cells[i].variance;
        for (Eigen::Index k = 0; k < cur.size(); ++k)
            if (cur(k) > prev(k) * (1.0 + slack)) return false;
    }
    return true;
}

EfficiencyReport compare_efficiency(const ExperimentResult& conc, const ExperimentResult& full, double slack,
                                    std::size_t bootstrap) {
    if (conc.truth.size() != full.truth.size() || (conc.truth - full.truth).cwiseAbs().maxCoeff() != 0.0 ||
        conc.param_names != full.param_names)
        throw std::invalid_argument("compare_efficiency: experiments do not share the true spec and layout");
    if (conc.plan.sample_sizes != full.plan.sample_sizes || conc.plan.base_seed != full.plan.base_seed ||
        conc.plan.replicates != full.plan.replicates || conc.plan.burn_in != full.plan.burn_in)
        throw std::invalid_argument("compare_efficiency: experiments do not share datasets");
    if (!conc.plan.true_spec.aarch().symmetric())
        throw std::invalid_argument("compare_efficiency: the truth must have beta = 0");
    if (conc.is_search() || full.is_search()) throw std::invalid_argument("compare_efficiency: search experiments");

    const std::size_t theta_size = conc.plan.true_spec.partition().regimes() * (conc.plan.true_spec.p() + 1);
    const Eigen::Index k = conc.truth.size();
    EfficiencyReport report;
    report.ok = true;
    for (std::size_t c = 0; c < conc.plan.sample_sizes.size(); ++c) {
        const std::size_t n = conc.plan.sample_sizes[c];
        const double root_n = std::sqrt(static_cast<double>(n));
        std::vector<Eigen::VectorXd> a;
        std::vector<Eigen::VectorXd> b;
        for (std::size_t i = 0; i < conc.rows.size(); ++i) {
            const auto& x = conc.rows[i];
            const auto& y = full.rows[i];
            if (x.n == n && x.converged && y.converged) {
                a.push_back(root_n * (x.estimates - conc.truth));
                b.push_back(root_n * (y.estimates - full.truth));
            }
        }
        EfficiencyCell cell{.n = n, .paired = a.size(), .param_names = conc.param_names};
        if (a.size() < 2) {
            report.ok = false;
            report.cells.push_back(std::move(cell));
            continue;
        }
        auto variances = [&](const std::vector<Eigen::VectorXd>& v, const std::vector<std::size_t>& idx) {
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
            for (auto i : idx) mean += v[i];
            mean /= static_cast<double>(idx.size());
            Eigen::VectorXd var = Eigen::VectorXd::Zero(k);
            for (auto i : idx) var += (v[i] - mean).cwiseAbs2();
            return Eigen::VectorXd(var / static_cast<double>(idx.size() - 1));
        };
        std::vector<std::size_t> all(a.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        cell.var_concentrated = variances(a, all);
        cell.var_full = variances(b, all);
        cell.ratio = cell.var_concentrated.cwiseQuotient(cell.var_full);

        // Paired bootstrap over replicates.
        const CounterRng rng(derive_seed(conc.plan.base_seed, n, 0xb007ULL));
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(k), s2 = Eigen::VectorXd::Zero(k);
        Eigen::VectorXd f1 = Eigen::VectorXd::Zero(k), f2 = Eigen::VectorXd::Zero(k);
        std::vector<std::size_t> idx(a.size());
        std::uint64_t draw = 0;
        for (std::size_t rep = 0; rep < bootstrap; ++rep) {
            for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform(draw++) * static_cast<double>(a.size()));
            const Eigen::VectorXd vc = variances(a, idx);
            const Eigen::VectorXd vf = variances(b, idx);
            s1 += vc;
            s2 += vc.cwiseAbs2();
            f1 += vf;
            f2 += vf.cwiseAbs2();
        }
        const double nb = static_cast<double>(std::max<std::size_t>(bootstrap, 2));
        cell.se_concentrated = ((s2 - s1.cwiseAbs2() / nb) / (nb - 1.0)).cwiseMax(0.0).cwiseSqrt();
        cell.se_full = ((f2 - f1.cwiseAbs2() / nb) / (nb - 1.0)).cwiseMax(0.0).cwiseSqrt();

        cell.theta_ok = true;
        cell.alpha_ok = true;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (static_cast<std::size_t>(j) < theta_size) {
                cell.theta_ok = cell.theta_ok && cell.ratio(j) >= 1.0 - slack;
            } else {
                cell.alpha_ok = cell.alpha_ok && cell.ratio(j) >= 1.0 - slack && cell.ratio(j) <= 1.0 + slack;
            }
        }
        report.ok = report.ok && cell.theta_ok && cell.alpha_ok;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

EfficiencyReport efficiency_comparison(const ExperimentPlan& concentrated, const ExperimentPlan& full,
                                       std::size_t threads, double slack) {
    if (concentrated.estimator != EstimatorKind::concentrated || full.estimator != EstimatorKind::full_symmetric)
        throw std::invalid_argument("efficiency_comparison: expected a concentrated and a full_symmetric plan");
    if (concentrated.variance_form != VarianceForm::symmetric)
        throw std::invalid_argument("efficiency_comparison: the concentrated plan must fit the symmetric form");
    if (pack_parameters(concentrated.true_spec, VarianceForm::asymmetric) !=
            pack_parameters(full.true_spec, VarianceForm::asymmetric) ||
        concentrated.true_spec.partition() != full.true_spec.partition())
        throw std::invalid_argument("efficiency_comparison: plans do not share the true spec");
    const auto a = run_experiment(concentrated, threads);
    const auto b = run_experiment(full, threads);
    return compare_efficiency(a, b, slack);
}

bool NormalityReport::ok() const noexcept {
    return !cells.empty() &&
           std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.skewness_ok && c.ad_ok && c.cov_ok; });
}

NormalityReport normality_diagnostics(const ExperimentResult& result) {
    if (result.is_search()) throw std::invalid_argument("normality_diagnostics: not available for search experiments");
    NormalityReport report;
    const Eigen::Index k = result.truth.size();
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const auto& cell = result.cells[c];
        NormalityCell out{.n = cell.n};
        // Shape statistics use the errors themselves (any constant scaling gives the
        // same skewness); the Anderson-Darling test uses studentized errors, so it
        // also checks that the standard errors are calibrated.
        std::vector<std::vector<double>> err(static_cast<std::size_t>(k));
        std::vector<std::vector<double>> z(static_cast<std::size_t>(k));
        for (const auto& r : result.rows) {
            if (r.n != cell.n || !r.converged) continue;
            if ((r.std_errors.array() > 0.0).all()) {
                for (Eigen::Index j = 0; j < k; ++j) {
                    const double e = r.estimates(j) - result.truth(j);
                    err[static_cast<std::size_t>(j)].push_back(e);
                    z[static_cast<std::size_t>(j)].push_back(e / r.std_errors(j));
                }
            }
        }
        out.used = z.empty() ? 0 : z[0].size();
        if (out.used < 100) throw std::invalid_argument("normality_diagnostics: need at least 100 usable replicates");
        out.skewness.resize(k);
        out.excess_kurtosis.resize(k);
        out.anderson_darling.resize(k);
        std::size_t passes = 0;
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto& e = err[static_cast<std::size_t>(j)];
            out.skewness(j) = stats::skewness(e);
            out.excess_kurtosis(j) = stats::excess_kurtosis(e);
            out.anderson_darling(j) = stats::anderson_darling_normal(z[static_cast<std::size_t>(j)]);
            if (out.anderson_darling(j) < stats::kAndersonDarlingCritical1pct) ++passes;
        }
        out.ad_pass_share = static_cast<double>(passes) / static_cast<double>(k);
        out.cov_rel_error.resize(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                out.cov_rel_error(i, j) = std::abs(cell.empirical_cov(i, j) - cell.mean_sandwich(i, j)) /
                                          std::sqrt(cell.mean_sandwich(i, i) * cell.mean_sandwich(j, j));
        out.max_cov_rel_error = out.cov_rel_error.maxCoeff();
        out.skewness_ok = (out.skewness.array().abs() < 0.2).all();
        out.ad_ok = out.ad_pass_share >= 0.95;
        out.cov_ok = out.max_cov_rel_error <= 0.25;
        report.cells.push_back(std::move(out));
    }
    return report;
}

}  // namespace taraarch
