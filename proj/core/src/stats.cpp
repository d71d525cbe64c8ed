#include "taraarch/stats.hpp"

#include "taraarch/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taraarch::stats {

namespace {

double central_moment(std::span<const double> x, double m, int k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v - m, k);
    return s / static_cast<double>(x.size());
}

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("variance: need at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double skewness(std::span<const double> x) {
    const double m = mean(x);
    const double m2 = central_moment(x, m, 2);
    return central_moment(x, m, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    const double m = mean(x);
    const double m2 = central_moment(x, m, 2);
    return central_moment(x, m, 4) / (m2 * m2) - 3.0;
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double quantile(std::vector<double> x, double level) {
    if (x.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(x.begin(), x.end());
    const double pos = level * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double anderson_darling_normal(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("anderson_darling_normal: empty sample");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double lo = std::clamp(normal_cdf(s[i]), 1e-300, 1.0);
        const double hi = std::clamp(normal_cdf(-s[s.size() - 1 - i]), 1e-300, 1.0);
        acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log(hi));
    }
    return -n - acc / n;
}

}  // namespace taraarch::stats
