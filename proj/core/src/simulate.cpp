#include "taraarch/simulate.hpp"

#include "taraarch/error.hpp"
#include "taraarch/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace taraarch {

SimulatedPath simulate_path(const ModelSpec& spec, const SimConfig& config) {
    if (config.n < 1) throw std::invalid_argument("simulate_path: n must be >= 1");

    const std::size_t lags = spec.mean_lags();
    const std::size_t q = spec.q();
    const std::size_t total = config.burn_in + config.n;
    const auto alphas = spec.aarch().alphas();
    const auto betas = spec.aarch().betas();

    std::vector<double> x(lags, 0.0);
    if (!config.init_values.empty()) {
        if (config.init_values.size() < lags) {
            throw std::invalid_argument("simulate_path: init_values needs at least max(p,d) = " +
                                        std::to_string(lags) + " values");
        }
        std::copy(config.init_values.end() - static_cast<std::ptrdiff_t>(lags), config.init_values.end(),
                  x.begin());
    }
    x.reserve(lags + total);

    std::vector<double> eps(q, 0.0);  // presample residuals
    eps.reserve(q + total);
    std::vector<double> z_out;
    std::vector<double> h_out;
    z_out.reserve(config.n);
    h_out.reserve(config.n);

    NormalStream normals(config.seed);
    for (std::size_t s = 0; s < total; ++s) {
        double h = spec.aarch().alpha0();
        const std::size_t now = q + s;
        for (std::size_t i = 1; i <= q; ++i) {
            const double e = eps[now - i];
            const double u = alphas[i - 1] * std::abs(e) + betas[i - 1] * e;
            h += u * u;
        }
        const double z = normals();
        const double e = z * std::sqrt(h);
        const double xt = conditional_mean(spec, x) + e;
        if (!std::isfinite(xt) || std::abs(xt) > kExplosiveBound) {
            const bool burning = s < config.burn_in;
            const std::string where = burning ? "burn-in step " + std::to_string(s)
                                              : "t = " + std::to_string(s - config.burn_in);
            throw ExplosivePathError(s, "simulate_path: explosive path, |x| exceeded 1e12 at " + where);
        }
        eps.push_back(e);
        x.push_back(xt);
        if (s >= config.burn_in) {
            z_out.push_back(z);
            h_out.push_back(h);
        }
    }

    std::vector<double> kept(x.end() - static_cast<std::ptrdiff_t>(config.n), x.end());
    return {TimeSeries(std::move(kept)), std::move(z_out), std::move(h_out)};
}

}  // namespace taraarch
