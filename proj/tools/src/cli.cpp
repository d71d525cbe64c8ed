#include "taraarch_cli/cli.hpp"

#include "taraarch/baselines.hpp"
#include "taraarch/csv_io.hpp"
#include "taraarch/error.hpp"
#include "taraarch/estimation.hpp"
#include "taraarch/json_io.hpp"
#include "taraarch/montecarlo.hpp"
#include "taraarch/search.hpp"
#include "taraarch/simulate.hpp"
#include "taraarch/transforms.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

namespace taraarch::cli {

namespace {

/// Raised for bad flag values discovered after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string output;
    std::string format;
};

struct TransformArgs {
    std::string input;
    std::string column;
    std::string method;
};

struct SimulateArgs {
    std::string spec;
    std::string canned;
    std::optional<double> alpha0;
    std::size_t n = 0;
    std::size_t burn_in = 500;
};

struct FitArgs {
    std::string input;
    std::string column;
    std::size_t p = 1;
    std::size_t q = 1;
    std::size_t delay = 1;
    std::vector<double> thresholds;
    std::string variance_form = "asymmetric";
    std::string estimator = "concentrated";
    bool search = false;
    std::vector<std::size_t> delays;
    std::size_t max_regimes = 2;
    bool include_single_regime = false;
    double min_regime_fraction = 0.1;
    double quantile_lo = 0.10;
    double quantile_hi = 0.90;
    double quantile_step = 0.025;
};

struct McArgs {
    std::string plan;
    std::string rows;
    std::string rows_full;
    std::string from_rows;
    std::size_t threads = 0;
};

struct PriceArgs {
    double spot = 0.0;
    double strike = 0.0;
    double rate = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Json read_json(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::vector<double> read_series(const std::string& path, const std::string& column) {
    std::istringstream in(read_file(path));
    return column.empty() ? read_column(in, path) : read_named_column(in, column, path);
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void emit(const Globals& g, const std::string& text, std::ostream& out) {
    if (g.output.empty()) {
        out << text;
        return;
    }
    std::ofstream file(g.output, std::ios::binary);
    if (!file || !(file << text)) throw DataError("cannot write '" + g.output + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << text)) throw DataError("cannot write '" + path + "'");
}

void warn_stationarity(const ModelSpec& spec, std::ostream& err) {
    const auto s = check_stationarity(spec);
    if (!s.variance_ok)
        err << fmt::format("warning: variance persistence sum(alpha^2 + beta^2) = {:.6g} >= 1\n", s.variance_persistence);
    if (!s.mean_ok)
        err << fmt::format("warning: max_j sum_k |phi_jk| = {:.6g} >= 1; the sufficient stationarity check fails\n",
                           s.max_abs_ar_sum);
}

std::string format_of(const Globals& g, const char* fallback) { return g.format.empty() ? fallback : g.format; }

int cmd_transform(const Globals& g, const TransformArgs& a, std::ostream& out) {
    const TimeSeries series(read_series(a.input, a.column), a.input);
    TimeSeries result = [&] {
        if (a.method == "log100") return log_return_transform(series, true);
        if (a.method == "log") return log_return_transform(series, false);
        if (a.method == "relative") return relative_return_transform(series);
        return box_cox_sunspot_transform(series);
    }();
    if (format_of(g, "csv") == "json") {
        emit(g, dump(Json{{"config", {{"input", a.input}, {"column", a.column}, {"method", a.method}}},
                          {"values", std::vector<double>(result.values().begin(), result.values().end())}}),
             out);
    } else {
        std::ostringstream s;
        write_column(s, result.values(), a.method);
        emit(g, s.str(), out);
    }
    return kOk;
}

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    if (a.spec.empty() == a.canned.empty()) throw UsageError("simulate: give exactly one of --spec or --canned");
    if (a.alpha0 && a.canned.empty()) throw UsageError("simulate: --alpha0 applies to --canned only");
    const ModelSpec spec = [&] {
        if (!a.canned.empty()) {
            const auto canned = find_canned_spec(a.canned);
            if (!canned) throw UsageError("simulate: unknown canned spec '" + a.canned + "'");
            return canned->model_spec(a.alpha0);
        }
        try {
            return spec_from_json(read_json(a.spec));
        } catch (const std::invalid_argument& e) {
            throw DataError(a.spec + ": " + e.what());
        }
    }();
    warn_stationarity(spec, err);
    const auto path = simulate_path(spec, SimConfig{.n = a.n, .burn_in = a.burn_in, .seed = g.seed});
    if (format_of(g, "csv") == "json") {
        const auto x = path.series.values();
        emit(g,
             dump(Json{{"config",
                        {{"spec", a.spec}, {"canned", a.canned}, {"n", a.n}, {"burn_in", a.burn_in}, {"seed", g.seed}}},
                       {"spec", spec_to_json(spec)},
                       {"x", std::vector<double>(x.begin(), x.end())},
                       {"h", path.variances},
                       {"z", path.innovations}}),
             out);
    } else {
        std::ostringstream s;
        write_path(s, path);
        emit(g, s.str(), out);
    }
    return kOk;
}

std::size_t fit_parameter_count(const FitArgs& a, VarianceForm form) {
    const std::size_t regimes = a.search ? a.max_regimes : a.thresholds.size() + 1;
    return parameter_names(regimes, a.p, a.q, form).size();
}

Json fit_config(const Globals& g, const FitArgs& a) {
    Json c{{"input", a.input},     {"column", a.column},       {"p", a.p},
           {"q", a.q},             {"estimator", a.estimator}, {"variance_form", a.variance_form},
           {"search", a.search},   {"seed", g.seed}};
    if (a.search) {
        c["delays"] = a.delays;
        c["max_regimes"] = a.max_regimes;
        c["include_single_regime"] = a.include_single_regime;
        c["min_regime_fraction"] = a.min_regime_fraction;
        c["quantile_lo"] = a.quantile_lo;
        c["quantile_hi"] = a.quantile_hi;
        c["quantile_step"] = a.quantile_step;
    } else {
        c["delay"] = a.delay;
        c["thresholds"] = a.thresholds;
    }
    return c;
}

std::string fit_table(const FitReport& r) {
    std::ostringstream s;
    s << "name,estimate,std_error\n";
    for (Eigen::Index i = 0; i < r.estimates.size(); ++i)
        s << r.param_names[static_cast<std::size_t>(i)] << ',' << format_number(r.estimates(i)) << ','
          << format_number(r.has_inference() ? r.std_errors(i) : std::numeric_limits<double>::quiet_NaN()) << '\n';
    return s.str();
}

int cmd_fit(const Globals& g, const FitArgs& a, std::ostream& out, std::ostream& err) {
    const auto form = variance_form_from_string(a.variance_form);
    const auto estimator = estimator_from_string(a.estimator);
    if (a.search && estimator != EstimatorKind::concentrated)
        throw UsageError("fit: --search uses the concentrated estimator");
    if (estimator == EstimatorKind::full_symmetric && form != VarianceForm::symmetric)
        throw UsageError("fit: --estimator full_symmetric requires --variance-form symmetric");
    if (a.search && a.delays.empty()) throw UsageError("fit: --search needs --delays");
    if (!std::is_sorted(a.thresholds.begin(), a.thresholds.end()))
        throw UsageError("fit: thresholds must be increasing");

    const TimeSeries series(read_series(a.input, a.column), a.input);
    const std::size_t k = fit_parameter_count(a, form);
    if (series.size() <= 10 * k) {
        throw UsageError(fmt::format("fit: {} observations; at least {} needed for {} parameters (n > 10 k)",
                                     series.size(), 10 * k + 1, k));
    }

    FitOptions opts;
    opts.variance_form = form;
    Json doc;
    FitReport report = [&] {
        try {
            if (a.search) {
                const auto grid = SearchGrid::quantile_grid(series, a.delays, a.max_regimes, a.include_single_regime,
                                                            a.min_regime_fraction, a.quantile_lo, a.quantile_hi,
                                                            a.quantile_step);
                auto found = threshold_delay_search(series, a.p, a.q, grid, opts);
                doc["search"] = search_to_json(found);
                return std::move(found.fit);
            }
            const ThresholdPartition partition(a.delay, a.thresholds);
            if (estimator == EstimatorKind::full_symmetric) return tar_arch_full_qmle(series, partition, a.p, a.q);
            return fit_alternating(series, partition, a.p, a.q, std::nullopt, opts);
        } catch (const BestIterateError<FitReport>& e) {
            Json best = fit_report_to_json(e.best());
            best["config"] = fit_config(g, a);
            best["error"] = e.what();
            emit(g, dump(best), out);
            throw;
        }
    }();
    warn_stationarity(report.spec, err);
    if (format_of(g, "json") == "csv") {
        emit(g, fit_table(report), out);
        return kOk;
    }
    Json body = fit_report_to_json(report);
    body["config"] = fit_config(g, a);
    if (doc.contains("search")) body["search"] = std::move(doc["search"]);
    emit(g, dump(body), out);
    return kOk;
}

ExperimentPlan load_plan(const Json& doc, const char* what) {
    try {
        return plan_from_json(doc);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string(what) + ": " + e.what());
    }
}

std::string rows_text(const ExperimentResult& r) {
    std::ostringstream s;
    write_rows(s, r);
    return s.str();
}

int cmd_mc(const Globals& g, const McArgs& a, std::ostream& out, std::ostream& err) {
    const Json doc = read_json(a.plan);
    const bool efficiency = doc.contains("concentrated") && doc.contains("full");
    if (efficiency && !a.from_rows.empty()) throw UsageError("mc: --from-rows applies to single experiments");

    auto prepare = [&](const Json& j, const char* what) {
        ExperimentPlan plan = load_plan(j, what);
        if (g.seed_given) plan.base_seed = g.seed;
        warn_stationarity(plan.true_spec, err);
        return plan;
    };

    if (efficiency) {
        const auto conc_plan = prepare(doc.at("concentrated"), "concentrated plan");
        const auto full_plan = prepare(doc.at("full"), "full plan");
        if (conc_plan.estimator != EstimatorKind::concentrated || full_plan.estimator != EstimatorKind::full_symmetric)
            throw DataError("mc: efficiency plans need a concentrated and a full_symmetric experiment");
        const auto conc = run_experiment(conc_plan, a.threads);
        const auto full = run_experiment(full_plan, a.threads);
        Json body{{"kind", "efficiency"},
                  {"concentrated", summary_to_json(conc)},
                  {"full", summary_to_json(full)}};
        try {
            body["comparison"] = efficiency_to_json(compare_efficiency(conc, full));
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("mc: ") + e.what());
        }
        if (!a.rows.empty()) write_text(a.rows, rows_text(conc));
        if (!a.rows_full.empty()) write_text(a.rows_full, rows_text(full));
        emit(g, format_of(g, "json") == "csv" ? rows_text(conc) : dump(body), out);
        return conc.failed || full.failed ? kFailedExperiment : kOk;
    }

    const auto plan = prepare(doc, "plan");
    const ExperimentResult result = [&] {
        if (a.from_rows.empty()) return run_experiment(plan, a.threads);
        ExperimentResult r{.plan = plan,
                           .param_names = parameter_names(plan.true_spec.partition().regimes(), plan.true_spec.p(),
                                                          plan.true_spec.q(), plan.fitted_form()),
                           .truth = true_parameters(plan)};
        std::istringstream in(read_file(a.from_rows));
        r.rows = read_rows(in, r.param_names.size());
        r.cells = summarize(plan, r.truth, r.rows);
        for (const auto& c : r.cells)
            if (c.nonconvergence_rate > plan.max_nonconvergence) r.failed = true;
        return r;
    }();

    Json body{{"kind", "experiment"}, {"summary", summary_to_json(result)}};
    const auto diagnostics = doc.value("diagnostics", std::vector<std::string>{});
    for (const auto& d : diagnostics) {
        if (d == "normality") {
            try {
                body["normality"] = normality_to_json(normality_diagnostics(result));
            } catch (const std::invalid_argument& e) {
                err << "warning: " << e.what() << '\n';
            }
        } else if (d == "monotone") {
            body["variances_monotone"] = variances_monotone(result);
        } else {
            throw DataError("mc: unknown diagnostic '" + d + "' (normality|monotone)");
        }
    }
    if (!a.rows.empty()) write_text(a.rows, rows_text(result));
    emit(g, format_of(g, "json") == "csv" ? rows_text(result) : dump(body), out);
    if (result.failed) {
        err << "error: non-convergence above " << plan.max_nonconvergence << " at some sample size\n";
        return kFailedExperiment;
    }
    return kOk;
}

int cmd_price(const Globals& g, const PriceArgs& a, std::ostream& out) {
    if (!(a.spot > 0.0) || !(a.strike >= 0.0) || !(a.sigma > 0.0) || !(a.tau > 0.0) || !std::isfinite(a.rate))
        throw UsageError("price: need spot > 0, strike >= 0, sigma > 0, tau > 0 and a finite rate");
    const double price = black_scholes_price(a.spot, a.strike, a.rate, a.sigma, a.tau);
    if (format_of(g, "csv") == "json") {
        emit(g,
             dump(Json{{"config",
                        {{"spot", a.spot}, {"strike", a.strike}, {"rate", a.rate}, {"sigma", a.sigma}, {"tau", a.tau}}},
                       {"price", price}}),
             out);
    } else {
        emit(g, fmt::format("{:.10g}\n", price), out);
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Threshold autoregression with asymmetric ARCH errors"};
    app.name("taraarch");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (simulate) or base seed override (mc)");
    app.add_option("--output", g.output, "Write the primary output to this file instead of stdout");
    app.add_option("--format", g.format, "Primary output format")->check(CLI::IsMember({"json", "csv"}));

    TransformArgs ta;
    auto* transform = app.add_subcommand("transform", "Price or count series to returns");
    transform->add_option("--input", ta.input, "One-column CSV")->required();
    transform->add_option("--column", ta.column, "Column name when the file has several");
    transform->add_option("--method", ta.method, "log100 | log | relative | boxcox")
        ->required()
        ->check(CLI::IsMember({"log100", "log", "relative", "boxcox"}));

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Simulate a path as index,x,h,z");
    simulate->add_option("--spec", sa.spec, "Model spec JSON");
    simulate->add_option("--canned", sa.canned, "Printed model by name (lynx, sunspot)");
    simulate->add_option("--alpha0", sa.alpha0, "alpha0 for a canned model");
    simulate->add_option("--n", sa.n, "Retained length")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--burn-in", sa.burn_in, "Discarded prefix")->capture_default_str();

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Estimate a TAR-AARCH model");
    fit->add_option("--input", fa.input, "CSV series")->required();
    fit->add_option("--column", fa.column, "Column name when the file has several");
    fit->add_option("--p", fa.p, "Autoregressive order")->capture_default_str();
    fit->add_option("--q", fa.q, "ARCH order")->capture_default_str()->check(CLI::PositiveNumber);
    fit->add_option("--delay", fa.delay, "Threshold delay d")->capture_default_str()->check(CLI::PositiveNumber);
    fit->add_option("--threshold", fa.thresholds, "Threshold value (repeat for more regimes)")->delimiter(',');
    fit->add_option("--variance-form", fa.variance_form, "asymmetric | symmetric | constant")
        ->capture_default_str()
        ->check(CLI::IsMember({"asymmetric", "symmetric", "constant"}));
    fit->add_option("--estimator", fa.estimator, "concentrated | full_symmetric")
        ->capture_default_str()
        ->check(CLI::IsMember({"concentrated", "full_symmetric"}));
    fit->add_flag("--search", fa.search, "Select delay and thresholds over a quantile grid");
    fit->add_option("--delays", fa.delays, "Candidate delays for --search")->delimiter(',');
    fit->add_option("--max-regimes", fa.max_regimes, "Largest regime count for --search")->capture_default_str();
    fit->add_flag("--include-single-regime", fa.include_single_regime, "Also consider l = 1");
    fit->add_option("--min-regime-fraction", fa.min_regime_fraction)->capture_default_str();
    fit->add_option("--quantile-lo", fa.quantile_lo)->capture_default_str();
    fit->add_option("--quantile-hi", fa.quantile_hi)->capture_default_str();
    fit->add_option("--quantile-step", fa.quantile_step)->capture_default_str();

    McArgs ma;
    auto* mc = app.add_subcommand("mc", "Run a Monte Carlo plan");
    mc->add_option("--plan", ma.plan, "Plan JSON")->required();
    mc->add_option("--rows", ma.rows, "Also write raw replicate rows to this CSV");
    mc->add_option("--rows-full", ma.rows_full, "Raw rows of the full estimator (efficiency plans)");
    mc->add_option("--from-rows", ma.from_rows, "Recompute summaries from a raw rows CSV instead of running");
    mc->add_option("--threads", ma.threads, "Worker threads (0 = hardware)")->capture_default_str();

    PriceArgs pa;
    auto* price = app.add_subcommand("price", "Black-Scholes call price");
    price->add_option("--spot", pa.spot)->required();
    price->add_option("--strike", pa.strike)->required();
    price->add_option("--rate", pa.rate)->required();
    price->add_option("--sigma", pa.sigma)->required();
    price->add_option("--tau", pa.tau)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (*transform) return cmd_transform(g, ta, out);
        if (*simulate) return cmd_simulate(g, sa, out, err);
        if (*fit) return cmd_fit(g, fa, out, err);
        if (*mc) return cmd_mc(g, ma, out, err);
        return cmd_price(g, pa, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ExplosivePathError& e) {
        err << "error: " << e.what() << " (time index " << e.index() << ")\n";
        return kDataError;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kNoConvergence;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const IdentificationError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::runtime_error& e) {
        // Every candidate of a search failed to fit.
        err << "error: " << e.what() << '\n';
        return kNoConvergence;
    }
}

}  // namespace taraarch::cli
