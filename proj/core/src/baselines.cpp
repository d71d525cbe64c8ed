#include "taraarch/baselines.hpp"

#include "taraarch/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace taraarch {

std::vector<double> arch_variance(double alpha0, std::span<const double> alphas, std::span<const double> residuals) {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("arch_variance: alpha0 must be > 0");
    std::vector<double> h(residuals.size());
    for (std::size_t t = 0; t < residuals.size(); ++t) {
        double v = alpha0;
        for (std::size_t i = 1; i <= alphas.size() && i <= t; ++i) v += alphas[i - 1] * residuals[t - i] * residuals[t - i];
        h[t] = v;
    }
    return h;
}

void GarchParams::validate() const {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("GarchParams: alpha0 must be > 0");
    for (double a : alphas)
        if (!(a >= 0.0)) throw std::invalid_argument("GarchParams: ARCH coefficients must be >= 0");
    for (double b : betas)
        if (!(b >= 0.0)) throw std::invalid_argument("GarchParams: GARCH coefficients must be >= 0");
}

bool GarchParams::covariance_stationary() const noexcept {
    double s = 0.0;
    for (double a : alphas) s += a;
    for (double b : betas) s += b;
    return s < 1.0;
}

std::vector<double> garch_variance(const GarchParams& params, std::span<const double> residuals, double presample_h) {
    params.validate();
    std::vector<double> h(residuals.size());
    for (std::size_t t = 0; t < residuals.size(); ++t) {
        double v = params.alpha0;
        for (std::size_t i = 1; i <= params.alphas.size() && i <= t; ++i)
            v += params.alphas[i - 1] * residuals[t - i] * residuals[t - i];
        for (std::size_t i = 1; i <= params.betas.size(); ++i) v += params.betas[i - 1] * (i <= t ? h[t - i] : presample_h);
        h[t] = v;
    }
    return h;
}

bool EgarchParams::stationary() const noexcept { return std::abs(gamma1) < 1.0; }

double egarch_news(const EgarchParams& params, double x) {
    constexpr double mean_abs = std::numbers::sqrt2 * std::numbers::inv_sqrtpi;  // E|z| = sqrt(2/pi)
    return params.omega * x + params.lambda * (std::abs(x) - mean_abs);
}

std::vector<double> egarch_log_variance(const EgarchParams& params, std::span<const double> standardized_shocks,
                                        double presample_logh) {
    std::vector<double> out(standardized_shocks.size());
    double logh = presample_logh;
    for (std::size_t t = 0; t < standardized_shocks.size(); ++t) {
        logh = params.gamma0 + params.gamma1 * logh + egarch_news(params, standardized_shocks[t]);
        out[t] = logh;
    }
    return out;
}

ModelSpec CannedSpec::model_spec(std::optional<double> alpha0) const {
    if (!alpha0) {
        if (noise_sd.empty())
            throw std::invalid_argument("canned spec '" + name + "' has no printed noise level; supply alpha0");
        alpha0 = noise_sd.front() * noise_sd.front();
    }
    return {partition, tar, AarchParams::homoskedastic(*alpha0, 1)};
}

std::vector<CannedSpec> canned_specs() {
    Eigen::MatrixXd lynx(2, 3);
    lynx << 0.62, 1.25, -0.43,
            2.25, 1.52, -1.24;

    Eigen::MatrixXd sunspot = Eigen::MatrixXd::Zero(2, 12);
    sunspot.row(0) << 1.9191, 0.8416, 0.0728, -0.3153, 0.1479, -1.985, -0.0005, 0.1875, -0.2701, 0.2116, 0.0091,
        0.0873;
    sunspot.row(1).head(4) << 4.2746, 1.4431, -0.8408, 0.0554;

    return {
        {"lynx", "Tong (1983), Canadian lynx, log10 scale", ThresholdPartition(2, {3.25}), TarParams(lynx),
         {0.2, 0.25}},
        {"sunspot", "Tong (1983), sunspot numbers 1749-1924 after x = 2(sqrt(w) - 1)", ThresholdPartition(8, {11.9824}),
         TarParams(sunspot), {}},
    };
}

std::optional<CannedSpec> find_canned_spec(std::string_view name) {
    for (auto& c : canned_specs())
        if (c.name == name) return c;
    return std::nullopt;
}

double black_scholes_price(double spot, double strike, double rate, double sigma, double tau) {
    if (!(spot > 0.0) || !std::isfinite(spot)) throw std::invalid_argument("black_scholes_price: S must be > 0");
    if (!(strike >= 0.0) || !std::isfinite(strike)) throw std::invalid_argument("black_scholes_price: K must be >= 0");
    if (!std::isfinite(rate)) throw std::invalid_argument("black_scholes_price: r must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("black_scholes_price: sigma must be > 0");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("black_scholes_price: tau must be > 0");
    if (strike == 0.0) return spot;
    const double vol = sigma * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * tau) / vol;
    return spot * normal_cdf(d1) - strike * std::exp(-rate * tau) * normal_cdf(d1 - vol);
}

}  // namespace taraarch
