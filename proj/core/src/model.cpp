#include "taraarch/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace taraarch {

namespace {

bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, std::optional<std::string> origin_label)
    : values_(std::move(values)), label_(std::move(origin_label)) {
    if (values_.empty()) throw std::invalid_argument("TimeSeries: empty series");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("TimeSeries: non-finite value at index " + std::to_string(i));
    }
}

ThresholdPartition::ThresholdPartition(std::size_t delay, std::vector<double> thresholds)
    : delay_(delay), thresholds_(std::move(thresholds)) {
    if (delay_ == 0) throw std::invalid_argument("ThresholdPartition: delay must be >= 1");
    if (!all_finite(thresholds_)) throw std::invalid_argument("ThresholdPartition: non-finite threshold");
    for (std::size_t i = 1; i < thresholds_.size(); ++i) {
        if (!(thresholds_[i - 1] < thresholds_[i]))
            throw std::invalid_argument("ThresholdPartition: thresholds must be strictly increasing");
    }
}

std::size_t ThresholdPartition::regime_of(double x) const noexcept {
    // Number of thresholds strictly below x.
    return static_cast<std::size_t>(std::lower_bound(thresholds_.begin(), thresholds_.end(), x) -
                                    thresholds_.begin());
}

TarParams::TarParams(Eigen::MatrixXd coefficients) : coef_(std::move(coefficients)) {
    if (coef_.rows() < 1 || coef_.cols() < 1)
        throw std::invalid_argument("TarParams: need at least one regime and an intercept column");
    if (!coef_.allFinite()) throw std::invalid_argument("TarParams: non-finite coefficient");
}

AarchParams::AarchParams(double alpha0, std::vector<double> alphas, std::vector<double> betas)
    : alpha0_(alpha0), alphas_(std::move(alphas)), betas_(std::move(betas)) {
    if (!(alpha0_ > 0.0) || !std::isfinite(alpha0_))
        throw std::invalid_argument("AarchParams: alpha0 must be finite and > 0");
    if (alphas_.empty()) throw std::invalid_argument("AarchParams: q must be >= 1");
    if (alphas_.size() != betas_.size())
        throw std::invalid_argument("AarchParams: alphas and betas must have the same length");
    if (!all_finite(alphas_) || !all_finite(betas_))
        throw std::invalid_argument("AarchParams: non-finite coefficient");
}

bool AarchParams::symmetric() const noexcept {
    return std::all_of(betas_.begin(), betas_.end(), [](double b) { return b == 0.0; });
}

double AarchParams::persistence() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < alphas_.size(); ++i) s += alphas_[i] * alphas_[i] + betas_[i] * betas_[i];
    return s;
}

ModelSpec::ModelSpec(ThresholdPartition partition, TarParams tar, AarchParams aarch)
    : partition_(std::move(partition)), tar_(std::move(tar)), aarch_(std::move(aarch)) {
    if (tar_.regimes() != partition_.regimes()) {
        throw std::invalid_argument("ModelSpec: TAR coefficient rows (" + std::to_string(tar_.regimes()) +
                                    ") do not match regime count (" + std::to_string(partition_.regimes()) +
                                    ")");
    }
}

std::size_t ModelSpec::mean_lags() const noexcept { return std::max(p(), partition_.delay()); }

std::size_t ModelSpec::conditioning_lags() const noexcept { return std::max(mean_lags(), q()); }

StationarityReport check_stationarity(const ModelSpec& spec) {
    StationarityReport r;
    r.variance_persistence = spec.aarch().persistence();
    const auto& c = spec.tar().coefficients();
    for (Eigen::Index j = 0; j < c.rows(); ++j) {
        double s = 0.0;
        for (Eigen::Index k = 1; k < c.cols(); ++k) s += std::abs(c(j, k));
        r.max_abs_ar_sum = std::max(r.max_abs_ar_sum, s);
    }
    r.variance_ok = r.variance_persistence < 1.0;
    r.mean_ok = r.max_abs_ar_sum < 1.0;
    return r;
}

double conditional_mean(const ModelSpec& spec, std::span<const double> history) {
    const std::size_t need = spec.mean_lags();
    if (history.size() < need) {
        throw std::invalid_argument("conditional_mean: need max(p,d) = " + std::to_string(need) +
                                    " presample values, got " + std::to_string(history.size()));
    }
    const std::size_t h = history.size();
    const std::size_t j = spec.partition().regime_of(history[h - spec.partition().delay()]);
    double m = spec.tar()(j, 0);
    for (std::size_t k = 1; k <= spec.p(); ++k) m += spec.tar()(j, k) * history[h - k];
    return m;
}

std::vector<double> residuals(const ModelSpec& spec, const TimeSeries& series) {
    const std::size_t start = spec.mean_lags();
    if (series.size() <= start) {
        throw std::invalid_argument("residuals: series length " + std::to_string(series.size()) +
                                    " must exceed max(p,d) = " + std::to_string(start));
    }
    const auto x = series.values();
    std::vector<double> out;
    out.reserve(x.size() - start);
    for (std::size_t t = start; t < x.size(); ++t) out.push_back(x[t] - conditional_mean(spec, x.first(t)));
    return out;
}

std::vector<double> variance_path(const AarchParams& aarch, std::span<const double> residuals,
                                  double presample_h) {
    if (!(presample_h >= 0.0)) throw std::invalid_argument("variance_path: presample_h must be >= 0");
    const auto a = aarch.alphas();
    const auto b = aarch.betas();
    const std::size_t q = aarch.order();
    std::vector<double> h(residuals.size());
    for (std::size_t t = 0; t < residuals.size(); ++t) {
        double v = aarch.alpha0();
        for (std::size_t i = 1; i <= q; ++i) {
            if (t >= i) {
                const double e = residuals[t - i];
                const double u = a[i - 1] * std::abs(e) + b[i - 1] * e;
                v += u * u;
            } else {
                v += (a[i - 1] * a[i - 1] + b[i - 1] * b[i - 1]) * presample_h;
            }
        }
        h[t] = v;
    }
    return h;
}

double news_impact(const AarchParams& aarch, double shock, std::size_t lag) {
    if (lag < 1 || lag > aarch.order()) {
        throw std::out_of_range("news_impact: lag " + std::to_string(lag) + " outside 1.." +
                                std::to_string(aarch.order()));
    }
    const double u = aarch.alphas()[lag - 1] * std::abs(shock) + aarch.betas()[lag - 1] * shock;
    return u * u;
}

}  // namespace taraarch
