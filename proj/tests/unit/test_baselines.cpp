#include "reference.hpp"
#include "taraarch/baselines.hpp"
#include "taraarch/error.hpp"
#include "taraarch/estimation.hpp"
#include "taraarch/rng.hpp"
#include "taraarch/simulate.hpp"
#include "taraarch/stats.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

using namespace taraarch;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Discounted risk-neutral expectation of the call payoff by adaptive quadrature.
double call_by_quadrature(double s, double k, double r, double sigma, double tau) {
    const double root = sigma * std::sqrt(tau);
    const double lo = (std::log(k / s) - (r - 0.5 * sigma * sigma) * tau) / root;
    auto integrand = [&](double z) {
        const double st = s * std::exp((r - 0.5 * sigma * sigma) * tau + root * z);
        return std::max(st - k, 0.0) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    using boost::math::quadrature::gauss_kronrod;
    const double upper = std::max(lo, 0.0) + 40.0;
    return std::exp(-r * tau) * gauss_kronrod<double, 61>::integrate(integrand, lo, upper, 15, 1e-14);
}

}  // namespace

TEST_CASE("arch recursion") {
    const std::vector<double> e{2.0, 0.0};
    CHECK_THAT(arch_variance(0.1, std::vector<double>{0.4}, e)[1], WithinAbs(1.7, 1e-15));
    for (double h : arch_variance(0.3, std::vector<double>{0.0, 0.0}, e)) CHECK(h == 0.3);
    CHECK(arch_variance(0.1, std::vector<double>{0.4}, e)[0] == 0.1);
}

TEST_CASE("garch nests arch and converges to its fixed point") {
    const CounterRng rng(1);
    std::vector<double> e(100);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = rng.normal(i);
    const GarchParams nested{.alpha0 = 0.2, .alphas = {0.3, 0.1}, .betas = {}};
    CHECK(garch_variance(nested, e, 5.0) == arch_variance(0.2, nested.alphas, e));

    const GarchParams g{.alpha0 = 0.05, .alphas = {0.1}, .betas = {0.85}};
    const std::vector<double> zeros(400, 0.0);
    const auto h = garch_variance(g, zeros, 1.0);
    CHECK_THAT(h[0], WithinAbs(0.05 + 0.85, 1e-15));
    CHECK_THAT(h[1], WithinAbs(0.05 + 0.85 * 0.9, 1e-15));
    CHECK_THAT(h.back(), WithinAbs(1.0 / 3.0, 1e-12));
    CHECK(g.covariance_stationary());
    CHECK_THROWS_AS(garch_variance(GarchParams{.alpha0 = 0.0, .alphas = {0.1}, .betas = {}}, e, 1.0),
                    std::invalid_argument);
}

TEST_CASE("simulated garch path matches the unconditional variance") {
    const GarchParams g{.alpha0 = 0.1, .alphas = {0.1}, .betas = {0.8}};
    const CounterRng rng(4);
    std::vector<double> e;
    double h = 1.0;
    double prev = 0.0;
    for (std::uint64_t i = 0; i < 400000; ++i) {
        h = g.alpha0 + g.alphas[0] * prev * prev + g.betas[0] * h;
        prev = rng.normal(i) * std::sqrt(h);
        if (i >= 1000) e.push_back(prev);
    }
    CHECK_THAT(stats::variance(e), WithinRel(0.1 / (1.0 - 0.9), 0.10));
    // The recursion reproduces the path it generated.
    const auto rebuilt = garch_variance(g, e, 1.0);
    CHECK(rebuilt.size() == e.size());
}

TEST_CASE("egarch news and log variance") {
    const EgarchParams centered{.gamma0 = 0.0, .gamma1 = 0.0, .omega = 0.0, .lambda = 1.0};
    CHECK_THAT(egarch_news(centered, 0.797884560802865355879892119869), WithinAbs(0.0, 1e-15));
    const EgarchParams p{.gamma0 = 0.0, .gamma1 = 0.0, .omega = 0.1, .lambda = 0.2};
    CHECK_THAT(egarch_news(p, 1.0), WithinAbs(0.140423087839426936619068841441, 1e-15));
    CHECK(egarch_news(p, 1.0) != egarch_news(p, -1.0));

    const EgarchParams quiet{.gamma0 = 0.1, .gamma1 = 0.5, .omega = 0.0, .lambda = 0.0};
    const std::vector<double> z{3.0, -1.0, 0.5};
    const auto lh = egarch_log_variance(quiet, z, 1.0);
    CHECK_THAT(lh[0], WithinAbs(0.6, 1e-15));
    CHECK_THAT(lh[1], WithinAbs(0.4, 1e-15));
    CHECK_THAT(lh[2], WithinAbs(0.3, 1e-15));
    for (double v : egarch_log_variance(p, z, 0.0)) CHECK(std::exp(v) > 0.0);
    CHECK(quiet.stationary());
    CHECK_FALSE(EgarchParams{.gamma1 = 1.0}.stationary());
}

TEST_CASE("mean absolute normal by quadrature") {
    using boost::math::quadrature::gauss_kronrod;
    const double e_abs = 2.0 * gauss_kronrod<double, 61>::integrate(
                                   [](double x) { return x * std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); },
                                   0.0, 40.0, 15, 1e-15);
    const EgarchParams centered{.lambda = 1.0};
    CHECK_THAT(egarch_news(centered, e_abs), WithinAbs(0.0, 1e-14));
}

TEST_CASE("canned specs carry the printed coefficients") {
    const auto lynx = find_canned_spec("lynx").value();
    CHECK(lynx.partition.delay() == 2);
    CHECK(lynx.partition.thresholds()[0] == 3.25);
    CHECK(lynx.tar(0, 0) == 0.62);
    CHECK(lynx.tar(0, 1) == 1.25);
    CHECK(lynx.tar(0, 2) == -0.43);
    CHECK(lynx.tar(1, 0) == 2.25);
    CHECK(lynx.tar(1, 1) == 1.52);
    CHECK(lynx.tar(1, 2) == -1.24);
    CHECK(lynx.noise_sd == std::vector<double>{0.2, 0.25});
    CHECK(lynx.model_spec().aarch().alpha0() == 0.2 * 0.2);

    const auto sun = find_canned_spec("sunspot").value();
    CHECK(sun.partition.delay() == 8);
    CHECK(sun.partition.thresholds()[0] == 11.9824);
    CHECK(sun.tar.order() == 11);
    CHECK(sun.tar(1, 0) == 4.2746);
    CHECK(sun.tar(1, 1) == 1.4431);
    CHECK(sun.tar(1, 2) == -0.8408);
    CHECK(sun.tar(1, 3) == 0.0554);
    CHECK(sun.noise_sd.empty());
    CHECK_THROWS_AS(sun.model_spec(), std::invalid_argument);
    CHECK(sun.model_spec(1.0).partition().regimes() == 2);

    CHECK_FALSE(find_canned_spec("nile").has_value());
    CHECK(canned_specs().size() == 2);
}

TEST_CASE("black-scholes price") {
    CHECK_THAT(black_scholes_price(100, 100, 0, 0.2, 1), WithinAbs(7.96556745540579664388738739864, 1e-10));
    CHECK(black_scholes_price(100, 0, 0.05, 0.3, 2) == 100.0);
    CHECK_THAT(black_scholes_price(100, 90, 0, 1e-12, 1), WithinAbs(10.0, 1e-6));
    CHECK_THAT(black_scholes_price(80, 100, 0.01, 1e-12, 1), WithinAbs(0.0, 1e-6));
    CHECK_THROWS_AS(black_scholes_price(-1, 100, 0, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(black_scholes_price(100, 100, 0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(black_scholes_price(100, -1, 0, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(black_scholes_price(100, 100, 0, 0.2, 0), std::invalid_argument);
}

TEST_CASE("black-scholes agrees with quadrature and is monotone") {
    for (double s : {80.0, 100.0, 125.0})
        for (double sigma : {0.1, 0.3})
            for (double tau : {0.25, 2.0})
                CHECK_THAT(black_scholes_price(s, 100, 0.03, sigma, tau),
                           WithinAbs(call_by_quadrature(s, 100, 0.03, sigma, tau), 1e-8));
    for (int i = 1; i < 20; ++i) {
        const double a = 0.05 * i;
        CHECK(black_scholes_price(100, 100, 0.02, a + 0.05, 1) > black_scholes_price(100, 100, 0.02, a, 1));
        CHECK(black_scholes_price(60 + 5 * i, 100, 0.02, 0.2, 1) < black_scholes_price(65 + 5 * i, 100, 0.02, 0.2, 1));
        CHECK(black_scholes_price(100, 60 + 5 * i, 0.02, 0.2, 1) > black_scholes_price(100, 65 + 5 * i, 0.02, 0.2, 1));
    }
}

TEST_CASE("full qmle on iid data reduces to sample moments") {
    const ModelSpec iid(ThresholdPartition::single_regime(), TarParams(Eigen::MatrixXd::Constant(1, 1, 0.5)),
                        AarchParams::homoskedastic(2.0));
    const auto path = simulate_path(iid, SimConfig{.n = 4000, .seed = 21});
    FitReport fit = [&] {
        try {
            return tar_arch_full_qmle(path.series, ThresholdPartition::single_regime(), 0, 1);
        } catch (const BestIterateError<FitReport>& e) {
            return e.best();
        }
    }();
    const auto x = path.series.values();
    const auto tail = x.subspan(1);
    const double m = stats::mean(tail);
    double ss = 0.0;
    for (double v : tail) ss += (v - m) * (v - m);
    ss /= static_cast<double>(tail.size());
    CHECK_THAT(fit.estimates(0), WithinAbs(m, 0.01));
    CHECK_THAT(fit.spec.aarch().alpha0(), WithinRel(ss, 0.03));
    // ARCH coefficient a = alpha^2 has standard error near sqrt(2 / n).
    CHECK(std::pow(fit.spec.aarch().alphas()[0], 2) < 0.05);
}

TEST_CASE("full qmle beats the truth and zeroes its score") {
    const auto truth = testing::symmetric_reference_spec();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto path = simulate_path(truth, SimConfig{.n = 4000, .seed = seed});
        const auto fit = tar_arch_full_qmle(path.series, truth.partition(), 1, 1);
        CHECK(fit.converged);
        CHECK(fit.estimator == "full_symmetric");
        CHECK(fit.variance_form == VarianceForm::symmetric);
        CHECK(fit.qll >= gaussian_qll(truth, path.series) - 1e-9);
        CHECK_THAT(fit.qll, WithinRel(gaussian_qll(fit.spec, path.series), 1e-12));
        CHECK(full_qmle_score(fit.spec, path.series).lpNorm<Eigen::Infinity>() < 1e-6);
        REQUIRE(fit.has_inference());
        for (Eigen::Index i = 0; i < fit.estimates.size(); ++i) {
            const double truth_i = pack_parameters(truth, VarianceForm::symmetric)(i);
            CHECK(std::abs(fit.estimates(i) - truth_i) < 4.0 * fit.std_errors(i));
        }
    }
}
