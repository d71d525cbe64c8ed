#include "reference.hpp"
#include "taraarch/baselines.hpp"
#include "taraarch/error.hpp"
#include "taraarch/rng.hpp"
#include "taraarch/simulate.hpp"
#include "taraarch/stats.hpp"
#include "taraarch/transforms.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

using namespace taraarch;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("counter rng draws depend only on seed and index") {
    const CounterRng a(42);
    const CounterRng b(42);
    const CounterRng c(43);
    CHECK(a.bits(7) == b.bits(7));
    CHECK(a.bits(7) != c.bits(7));
    CHECK(a.bits(7) != a.bits(8));
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = a.uniform(i);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
    NormalStream s(42, 5);
    CHECK(s() == a.normal(5));
    CHECK(s.position() == 6);
}

TEST_CASE("splitmix finalizer and seed derivation are pinned") {
    // Reference values of the published splitmix64 finalizer.
    CHECK(avalanche(0) == 0);
    CHECK(avalanche(1) == 0x5692161d100b05e5ULL);
    // First output of a splitmix64 generator seeded with 0.
    CHECK(avalanche(0x9e3779b97f4a7c15ULL) == 0xe220a8397b1dcdafULL);
    CHECK(derive_seed(1, 2, 3) == avalanche(avalanche(avalanche(1) ^ 2) + 0x9e3779b97f4a7c15ULL * 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK_THAT(normal_quantile(0.975), WithinAbs(1.959963984540054, 1e-14));
    CHECK(normal_quantile(0.5) == 0.0);
    for (double u : {1e-12, 1e-6, 0.01, 0.3, 0.7, 0.99, 1 - 1e-9})
        CHECK_THAT(normal_cdf(normal_quantile(u)), WithinRel(u, 1e-9));
}

TEST_CASE("normal draws have standard moments") {
    const CounterRng rng(2024);
    std::vector<double> z(200000);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = rng.normal(i);
    CHECK(std::abs(stats::mean(z)) < 0.01);
    CHECK(std::abs(stats::variance(z) - 1.0) < 0.01);
    CHECK(std::abs(stats::skewness(z)) < 0.02);
    CHECK(std::abs(stats::excess_kurtosis(z)) < 0.05);
}

TEST_CASE("iid normal path has unit variance") {
    const ModelSpec spec(ThresholdPartition::single_regime(), TarParams::zeros(1, 0), AarchParams::homoskedastic(1.0));
    const auto path = simulate_path(spec, SimConfig{.n = 100000, .seed = 1});
    const double v = stats::variance(path.series.values());
    CHECK(v >= 0.97);
    CHECK(v <= 1.03);
}

TEST_CASE("simulation is a pure function of spec and config") {
    const auto spec = testing::reference_spec();
    const SimConfig cfg{.n = 500, .burn_in = 100, .seed = 77};
    const auto a = simulate_path(spec, cfg);
    const auto b = simulate_path(spec, cfg);
    REQUIRE(a.series.size() == 500);
    CHECK(std::memcmp(a.series.values().data(), b.series.values().data(), 500 * sizeof(double)) == 0);
    CHECK(a.innovations == b.innovations);
    CHECK(a.variances == b.variances);
    const auto c = simulate_path(spec, SimConfig{.n = 500, .burn_in = 100, .seed = 78});
    CHECK(testing::as_vector(c.series.values()) != testing::as_vector(a.series.values()));
}

TEST_CASE("burn-in keeps the tail of a longer run") {
    const auto spec = testing::reference_spec();
    const auto longer = simulate_path(spec, SimConfig{.n = 300, .burn_in = 0, .seed = 5});
    const auto tail = simulate_path(spec, SimConfig{.n = 200, .burn_in = 100, .seed = 5});
    for (std::size_t t = 0; t < 200; ++t) REQUIRE(tail.series[t] == longer.series[t + 100]);
}

TEST_CASE("simulated pieces satisfy the model equations") {
    const auto spec = testing::reference_spec();
    const auto path = simulate_path(spec, SimConfig{.n = 2000, .seed = 9});
    const auto x = path.series.values();
    const auto a = spec.aarch();
    for (std::size_t t = 1; t < x.size(); ++t) {
        const double m = conditional_mean(spec, x.first(t));
        REQUIRE(std::abs(x[t] - m - path.innovations[t] * std::sqrt(path.variances[t])) <= 1e-10);
        const double e = x[t - 1] - (t >= 2 ? conditional_mean(spec, x.first(t - 1)) : 0.0);
        if (t >= 2) {
            const double u = a.alphas()[0] * std::abs(e) + a.betas()[0] * e;
            REQUIRE(std::abs(path.variances[t] - (a.alpha0() + u * u)) <= 1e-10);
        }
    }
}

TEST_CASE("symmetric errors have vanishing skewness") {
    const auto spec = testing::symmetric_reference_spec();
    const auto path = simulate_path(spec, SimConfig{.n = 100000, .seed = 314});
    const auto e = residuals(spec, path.series);
    CHECK(std::abs(stats::skewness(e)) < 0.1);
}

TEST_CASE("lynx mean visits both regimes") {
    const auto spec = find_canned_spec("lynx")->model_spec(0.01);
    const auto path = simulate_path(spec, SimConfig{.n = 10000, .seed = 8});
    std::size_t upper = 0;
    const auto x = path.series.values();
    for (std::size_t t = 2; t < x.size(); ++t) upper += spec.partition().regime_of(x[t - 2]);
    const double share = static_cast<double>(upper) / static_cast<double>(x.size() - 2);
    CHECK(share >= 0.05);
    CHECK(share <= 0.95);
}

TEST_CASE("explosive parameters abort with the time index") {
    // E log(9 z^2) > 0, so h grows without bound almost surely.
    const ModelSpec wild(ThresholdPartition::single_regime(), TarParams::zeros(1, 0), AarchParams(1.0, {3.0}, {0.0}));
    try {
        (void)simulate_path(wild, SimConfig{.n = 5000, .burn_in = 0, .seed = 1});
        FAIL("expected an explosive path");
    } catch (const ExplosivePathError& e) {
        CHECK(e.index() < 5000);
        CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("t = "));
    }
    CHECK_THROWS_AS(simulate_path(testing::reference_spec(), SimConfig{.n = 0}), std::invalid_argument);
}

TEST_CASE("return transforms") {
    const auto r = log_return_transform(TimeSeries({100.0, 101.0}), true);
    REQUIRE(r.size() == 1);
    CHECK_THAT(r[0], WithinAbs(0.995033085316808284821535754425, 1e-14));
    const auto flat = log_return_transform(TimeSeries({5.0, 5.0, 5.0}), true);
    for (double v : flat.values()) CHECK(v == 0.0);
    CHECK_THROWS_WITH(log_return_transform(TimeSeries({100.0, 0.0}), true), Catch::Matchers::ContainsSubstring("index 1"));
    CHECK_THROWS_AS(log_return_transform(TimeSeries({100.0}), true), DataError);

    CHECK_THAT(relative_return_transform(TimeSeries({100.0, 101.0}))[0], WithinAbs(0.01, 1e-15));
    CHECK_THAT(relative_return_transform(TimeSeries({100.0, 99.0}))[0], WithinAbs(-0.01, 1e-15));
    const auto still = relative_return_transform(TimeSeries({3.0, 3.0}));
    for (double v : still.values()) CHECK(v == 0.0);
    CHECK_THROWS_WITH(relative_return_transform(TimeSeries({1.0, 0.0, 2.0})), Catch::Matchers::ContainsSubstring("index 1"));

    const auto b = box_cox_sunspot_transform(TimeSeries({1.0, 4.0, 0.0}));
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 2.0);
    CHECK(b[2] == -2.0);
    CHECK_THROWS_AS(box_cox_sunspot_transform(TimeSeries({1.0, -1.0})), DataError);
}

TEST_CASE("unscaled log returns integrate back to prices") {
    const CounterRng rng(12);
    std::vector<double> prices{50.0};
    for (std::uint64_t i = 0; i < 2000; ++i) prices.push_back(prices.back() * std::exp(0.02 * rng.normal(i)));
    const auto r = log_return_transform(TimeSeries(prices), false);
    double p = prices[0];
    for (std::size_t t = 0; t < r.size(); ++t) {
        p *= std::exp(r[t]);
        REQUIRE(std::abs(p - prices[t + 1]) <= 1e-9 * prices[t + 1]);
    }
}
