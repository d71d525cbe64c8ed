#include "design.hpp"

#include "taraarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace taraarch::detail {

Design make_design(const TimeSeries& series, const ThresholdPartition& partition, std::size_t p,
                   std::size_t q, std::size_t start) {
    const std::size_t natural = std::max({p, q, partition.delay()});
    if (start == 0) start = natural;
    if (start < natural) throw std::invalid_argument("make_design: start precedes max(p, q, d)");
    if (series.size() <= start) {
        throw DataError("series length " + std::to_string(series.size()) + " must exceed the " +
                        std::to_string(start) + " conditioning observations");
    }
    const auto x = series.values();
    Design d;
    d.start = start;
    d.p = p;
    d.q = q;
    d.regimes = partition.regimes();
    const std::size_t n = x.size() - start;
    d.y.resize(n);
    d.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
    d.regime.resize(n);
    d.counts.assign(d.regimes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = start + i;
        d.y[i] = x[t];
        const auto row = static_cast<Eigen::Index>(i);
        d.z(row, 0) = 1.0;
        for (std::size_t k = 1; k <= p; ++k) d.z(row, static_cast<Eigen::Index>(k)) = x[t - k];
        d.regime[i] = partition.regime_of(x[t - partition.delay()]);
        ++d.counts[d.regime[i]];
    }
    return d;
}

void compute_residuals(const Design& d, const Eigen::MatrixXd& theta, std::span<double> out) {
    const auto w = static_cast<Eigen::Index>(d.width());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto j = static_cast<Eigen::Index>(d.regime[i]);
        const auto row = static_cast<Eigen::Index>(i);
        double m = 0.0;
        for (Eigen::Index k = 0; k < w; ++k) m += theta(j, k) * d.z(row, k);
        out[i] = d.y[i] - m;
    }
}

double presample_variance(std::span<const double> e) {
    double s = 0.0;
    for (double v : e) s += v * v;
    return e.empty() ? 0.0 : s / static_cast<double>(e.size());
}

void compute_variance(const AarchParams& aarch, std::span<const double> e, double presample,
                      std::span<double> out) {
    const auto a = aarch.alphas();
    const auto b = aarch.betas();
    const std::size_t q = aarch.order();
    for (std::size_t t = 0; t < e.size(); ++t) {
        double v = aarch.alpha0();
        for (std::size_t i = 1; i <= q; ++i) {
            if (t >= i) {
                const double u = a[i - 1] * std::abs(e[t - i]) + b[i - 1] * e[t - i];
                v += u * u;
            } else {
                v += (a[i - 1] * a[i - 1] + b[i - 1] * b[i - 1]) * presample;
            }
        }
        out[t] = v;
    }
}

double quasi_loglik(std::span<const double> e, std::span<const double> h) {
    double s = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) s += std::log(h[t]) + e[t] * e[t] / h[t];
    return -0.5 * s;
}

PathState evaluate(const Design& d, const Eigen::MatrixXd& theta, const AarchParams& aarch) {
    PathState s;
    s.e.resize(d.size());
    s.h.resize(d.size());
    compute_residuals(d, theta, s.e);
    s.presample = presample_variance(s.e);
    compute_variance(aarch, s.e, s.presample, s.h);
    s.qll = quasi_loglik(s.e, s.h);
    return s;
}

Eigen::VectorXd theta_equations(const Design& d, const PathState& s) {
    const auto w = static_cast<Eigen::Index>(d.width());
    Eigen::VectorXd eq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.theta_size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double c = s.e[i] / s.h[i];
        const auto base = static_cast<Eigen::Index>(d.regime[i]) * w;
        for (Eigen::Index k = 0; k < w; ++k) eq(base + k) += c * d.z(static_cast<Eigen::Index>(i), k);
    }
    return eq;
}

}  // namespace taraarch::detail
