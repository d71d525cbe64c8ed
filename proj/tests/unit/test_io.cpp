#include "reference.hpp"
#include "taraarch/csv_io.hpp"
#include "taraarch/error.hpp"
#include "taraarch/estimation.hpp"
#include "taraarch/json_io.hpp"
#include "taraarch/montecarlo.hpp"
#include "taraarch/rng.hpp"
#include "taraarch/simulate.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

using namespace taraarch;
using Catch::Matchers::ContainsSubstring;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool bit_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (!bit_equal(a.data()[i], b.data()[i]) && !(std::isnan(a.data()[i]) && std::isnan(b.data()[i]))) return false;
    return true;
}

}  // namespace

TEST_CASE("spec json round-trips bit for bit") {
    const CounterRng rng(3);
    Eigen::MatrixXd phi(2, 3);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = rng.normal(static_cast<std::uint64_t>(i)) / 3.0;
    const ModelSpec spec(ThresholdPartition(2, {0.1 / 3.0}), TarParams(phi), AarchParams(1.0 / 7.0, {0.3, 0.1}, {-0.2, 1e-300}));
    const auto doc = Json::parse(spec_to_json(spec).dump());
    const auto back = spec_from_json(doc);
    CHECK(back.partition() == spec.partition());
    CHECK(bit_equal(back.tar().coefficients(), spec.tar().coefficients()));
    CHECK(bit_equal(back.aarch().alpha0(), spec.aarch().alpha0()));
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(bit_equal(back.aarch().alphas()[i], spec.aarch().alphas()[i]));
        CHECK(bit_equal(back.aarch().betas()[i], spec.aarch().betas()[i]));
    }
    CHECK(spec_to_json(back).dump() == spec_to_json(spec).dump());
}

TEST_CASE("spec json rejects malformed documents") {
    auto doc = spec_to_json(testing::reference_spec());
    auto missing = doc;
    missing.erase("alpha0");
    CHECK_THROWS_AS(spec_from_json(missing), std::invalid_argument);
    auto shape = doc;
    shape["tar"] = Json::array({Json::array({0.1, 0.2})});
    CHECK_THROWS_AS(spec_from_json(shape), std::invalid_argument);
    auto no_betas = doc;
    no_betas.erase("betas");
    CHECK(spec_from_json(no_betas).aarch().symmetric());
    CHECK_THROWS_AS(spec_from_json(Json::array()), std::invalid_argument);
}

TEST_CASE("fit report json round-trips") {
    const auto truth = testing::reference_spec();
    const auto path = simulate_path(truth, SimConfig{.n = 1500, .seed = 4});
    const auto fit = fit_alternating(path.series, truth.partition(), 1, 1);
    const auto text = fit_report_to_json(fit).dump();
    const auto back = fit_report_from_json(Json::parse(text));
    CHECK(back.estimator == fit.estimator);
    CHECK(back.variance_form == fit.variance_form);
    CHECK(back.param_names == fit.param_names);
    CHECK(bit_equal(back.estimates, fit.estimates));
    CHECK(bit_equal(back.std_errors, fit.std_errors));
    CHECK(bit_equal(back.covariance, fit.covariance));
    CHECK(bit_equal(back.info_matrix, fit.info_matrix));
    CHECK(bit_equal(back.qll, fit.qll));
    CHECK(back.trace == fit.trace);
    CHECK(back.observations == fit.observations);
    CHECK(back.iterations == fit.iterations);
    CHECK(back.converged == fit.converged);
    CHECK(fit_report_to_json(back).dump() == text);
}

TEST_CASE("plan json materializes defaults and validates") {
    ExperimentPlan plan{.true_spec = testing::lynx_style_spec(), .sample_sizes = {500, 1000}, .replicates = 7,
                        .base_seed = 0xffffffffffffffffULL};
    plan.search = SearchPlan{.delays = {1, 2, 3}};
    const auto doc = plan_to_json(plan);
    CHECK(doc.contains("burn_in"));
    CHECK(doc.contains("max_nonconvergence"));
    CHECK(doc["search"].contains("quantile_step"));
    const auto back = plan_from_json(Json::parse(doc.dump()));
    CHECK(back.base_seed == plan.base_seed);
    CHECK(back.sample_sizes == plan.sample_sizes);
    CHECK(back.search->delays == plan.search->delays);
    CHECK(plan_to_json(back).dump() == doc.dump());

    Json sparse{{"true_spec", spec_to_json(testing::reference_spec())}, {"sample_sizes", {200}}};
    const auto filled = plan_from_json(sparse);
    CHECK(filled.replicates == 1);
    CHECK(filled.burn_in == 500);
    CHECK_FALSE(filled.search.has_value());

    sparse["sample_sizes"] = Json::array();
    CHECK_THROWS_AS(plan_from_json(sparse), std::invalid_argument);
}

TEST_CASE("summary json carries cells that read back") {
    const ExperimentPlan plan{.true_spec = testing::reference_spec(), .sample_sizes = {8, 300}, .replicates = 4,
                              .base_seed = 1, .burn_in = 100};
    const auto res = run_experiment(plan, 1);
    const auto doc = Json::parse(summary_to_json(res).dump());
    CHECK(doc["failed"].get<bool>() == res.failed);
    CHECK(doc["cells"][0]["bias"][0].is_null());  // no fit converges at n = 8
    const auto cells = cells_from_json(doc);
    REQUIRE(cells.size() == res.cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(cells[i].n == res.cells[i].n);
        CHECK(cells[i].converged == res.cells[i].converged);
        CHECK(bit_equal(cells[i].bias, res.cells[i].bias));
        CHECK(bit_equal(cells[i].empirical_cov, res.cells[i].empirical_cov));
        CHECK(bit_equal(cells[i].coverage, res.cells[i].coverage));
    }
}

TEST_CASE("csv numbers use 17 significant digits") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    const CounterRng rng(9);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double v = rng.normal(i) * std::pow(10.0, static_cast<double>(i % 40) - 20.0);
        REQUIRE(bit_equal(std::stod(format_number(v)), v));
    }
}

TEST_CASE("csv column reading") {
    std::istringstream plain("1\n2.5\n-3e2\n");
    CHECK(read_column(plain) == std::vector<double>{1.0, 2.5, -300.0});
    std::istringstream headed("price\n100\n101\n\n");
    CHECK(read_column(headed) == std::vector<double>{100.0, 101.0});
    std::istringstream crlf("x\r\n1\r\n2\r\n");
    CHECK(read_column(crlf) == std::vector<double>{1.0, 2.0});

    std::istringstream bad("x\n1\nabc\n");
    CHECK_THROWS_WITH(read_column(bad, "bad.csv"), ContainsSubstring("bad.csv:3"));
    std::istringstream late("1\n2\nheader\n");
    CHECK_THROWS_AS(read_column(late), DataError);
    std::istringstream trailing("1\n2x\n");
    CHECK_THROWS_WITH(read_column(trailing, "t.csv"), ContainsSubstring("t.csv:2"));

    std::istringstream named("date,close\n1,10.5\n2,11\n");
    CHECK(read_named_column(named, "close") == std::vector<double>{10.5, 11.0});
    std::istringstream named2("date,close\n1,10.5\n");
    CHECK_THROWS_AS(read_named_column(named2, "open"), DataError);
}

TEST_CASE("csv writers round-trip") {
    const std::vector<double> v{0.1, -1e-300, 12345.678};
    std::ostringstream out;
    write_column(out, v, "r");
    std::istringstream in(out.str());
    const auto back = read_column(in);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(bit_equal(back[i], v[i]));

    const auto path = simulate_path(testing::reference_spec(), SimConfig{.n = 5, .seed = 1});
    std::ostringstream p;
    write_path(p, path);
    CHECK(p.str().rfind("index,x,h,z\n0,", 0) == 0);
    std::istringstream again(p.str());
    const auto xs = read_named_column(again, "x");
    for (std::size_t i = 0; i < 5; ++i) CHECK(bit_equal(xs[i], path.series[i]));
}

TEST_CASE("experiment rows round-trip through csv") {
    ExperimentPlan plan{.true_spec = testing::reference_spec(), .sample_sizes = {8, 300}, .replicates = 3,
                        .base_seed = 5, .burn_in = 100};
    const auto res = run_experiment(plan, 1);
    std::ostringstream out;
    write_rows(out, res);
    std::istringstream in(out.str());
    const auto rows = read_rows(in, static_cast<std::size_t>(res.truth.size()));
    REQUIRE(rows.size() == res.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == res.rows[i].n);
        CHECK(rows[i].r == res.rows[i].r);
        CHECK(rows[i].seed == res.rows[i].seed);
        CHECK(rows[i].converged == res.rows[i].converged);
        if (res.rows[i].converged) {
            CHECK(bit_equal(rows[i].estimates, res.rows[i].estimates));
            CHECK(bit_equal(rows[i].std_errors, res.rows[i].std_errors));
            CHECK(bit_equal(rows[i].covariance, res.rows[i].covariance));
        }
    }
    // Summaries recomputed from the file match the live run.
    ExperimentResult reread{.plan = plan, .param_names = res.param_names, .truth = res.truth, .rows = rows};
    reread.cells = summarize(plan, res.truth, rows);
    reread.failed = res.failed;
    CHECK(Json(summary_to_json(reread)).dump() == summary_to_json(res).dump());

    plan.search = SearchPlan{.delays = {1, 2}};
    plan.sample_sizes = {600};
    plan.replicates = 2;
    const auto found = run_experiment(plan, 1);
    std::ostringstream s;
    write_rows(s, found);
    std::istringstream sin(s.str());
    const auto srows = read_rows(sin, static_cast<std::size_t>(found.truth.size()));
    REQUIRE(srows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(srows[i].selected_delay == found.rows[i].selected_delay);
        CHECK(srows[i].selected_thresholds == found.rows[i].selected_thresholds);
    }
}
