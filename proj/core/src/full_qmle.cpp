#include "design.hpp"
#include "taraarch/baselines.hpp"
#include "taraarch/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace taraarch {

namespace {

/// Q = 1/2 sum (log h + e^2/h) / N with h_t = a0 + sum a_i e_{t-i}^2; the presample fill
/// a_i * mean(e^2) moves with theta. Gradient w.r.t. (theta, a0, a_i) when requested.
double full_objective(const detail::Design& d, const Eigen::MatrixXd& theta, double a0, std::span<const double> a,
                      Eigen::VectorXd* grad) {
    const std::size_t n = d.size();
    const std::size_t q = a.size();
    const auto w = static_cast<Eigen::Index>(d.width());
    std::vector<double> e(n);
    detail::compute_residuals(d, theta, e);
    const double s = detail::presample_variance(e);

    std::vector<double> h(n);
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double v = a0;
        for (std::size_t i = 1; i <= q; ++i) v += a[i - 1] * (t >= i ? e[t - i] * e[t - i] : s);
        h[t] = v;
        total += std::log(v) + e[t] * e[t] / v;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    if (grad == nullptr) return 0.5 * total * inv_n;

    const auto k_theta = static_cast<Eigen::Index>(d.theta_size());
    grad->setZero(k_theta + 1 + static_cast<Eigen::Index>(q));
    std::vector<double> gh(n);
    double presample_weight = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        gh[t] = 0.5 * (1.0 / h[t] - e[t] * e[t] / (h[t] * h[t]));
        (*grad)(k_theta) += gh[t];
        for (std::size_t i = 1; i <= q; ++i) {
            if (t >= i) {
                (*grad)(k_theta + static_cast<Eigen::Index>(i)) += gh[t] * e[t - i] * e[t - i];
            } else {
                (*grad)(k_theta + static_cast<Eigen::Index>(i)) += gh[t] * s;
                presample_weight += gh[t] * a[i - 1];
            }
        }
    }
    for (std::size_t u = 0; u < n; ++u) {
        double r = e[u] / h[u];
        for (std::size_t i = 1; i <= q && u + i < n; ++i) r += 2.0 * e[u] * a[i - 1] * gh[u + i];
        r += 2.0 * presample_weight * inv_n * e[u];
        const auto base = static_cast<Eigen::Index>(d.regime[u]) * w;
        grad->segment(base, w) -= r * d.z.row(static_cast<Eigen::Index>(u)).transpose();
    }
    *grad *= inv_n;
    return 0.5 * total * inv_n;
}

/// Per-observation scores dl_t / d(theta, a0, a_i), one row per observation.
Eigen::MatrixXd observation_scores(const detail::Design& d, const Eigen::MatrixXd& theta, double a0,
                                   std::span<const double> a) {
    const std::size_t n = d.size();
    const std::size_t q = a.size();
    const auto w = static_cast<Eigen::Index>(d.width());
    const auto k_theta = static_cast<Eigen::Index>(d.theta_size());
    std::vector<double> e(n);
    detail::compute_residuals(d, theta, e);
    const double s = detail::presample_variance(e);

    // de_u/dtheta = -z_u on the regime block of u; ds/dtheta = 2/N sum e_u de_u/dtheta.
    Eigen::VectorXd ds = Eigen::VectorXd::Zero(k_theta);
    for (std::size_t u = 0; u < n; ++u) {
        const auto base = static_cast<Eigen::Index>(d.regime[u]) * w;
        ds.segment(base, w) -= (2.0 * e[u] / static_cast<double>(n)) * d.z.row(static_cast<Eigen::Index>(u)).transpose();
    }

    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), k_theta + 1 + static_cast<Eigen::Index>(q));
    Eigen::VectorXd dh(k_theta);
    for (std::size_t t = 0; t < n; ++t) {
        double h = a0;
        for (std::size_t i = 1; i <= q; ++i) h += a[i - 1] * (t >= i ? e[t - i] * e[t - i] : s);
        const double lh = -0.5 * (1.0 / h - e[t] * e[t] / (h * h));  // dl/dh
        const auto row = static_cast<Eigen::Index>(t);

        dh.setZero();
        for (std::size_t i = 1; i <= q; ++i) {
            if (t >= i) {
                const std::size_t u = t - i;
                const auto base = static_cast<Eigen::Index>(d.regime[u]) * w;
                dh.segment(base, w) -= (2.0 * a[i - 1] * e[u]) * d.z.row(static_cast<Eigen::Index>(u)).transpose();
            } else {
                dh += a[i - 1] * ds;
            }
        }
        Eigen::VectorXd g = lh * dh;
        const auto base = static_cast<Eigen::Index>(d.regime[t]) * w;
        g.segment(base, w) += (e[t] / h) * d.z.row(row).transpose();  // dl/de * de/dtheta
        scores.row(row).head(k_theta) = g.transpose();
        scores(row, k_theta) = lh;
        for (std::size_t i = 1; i <= q; ++i)
            scores(row, k_theta + static_cast<Eigen::Index>(i)) = lh * (t >= i ? e[t - i] * e[t - i] : s);
    }
    return scores;
}

struct Unpacked {
    Eigen::MatrixXd theta;
    double a0;
    std::vector<double> a;
};

Unpacked unpack_natural(const Eigen::VectorXd& v, const detail::Design& d, bool logs) {
    const auto l = static_cast<Eigen::Index>(d.regimes);
    const auto w = static_cast<Eigen::Index>(d.width());
    Unpacked u{Eigen::MatrixXd(l, w), 0.0, std::vector<double>(d.q)};
    for (Eigen::Index j = 0; j < l; ++j) u.theta.row(j) = v.segment(j * w, w).transpose();
    const Eigen::Index at = l * w;
    u.a0 = logs ? std::exp(v(at)) : v(at);
    for (std::size_t i = 0; i < d.q; ++i) {
        const double x = v(at + 1 + static_cast<Eigen::Index>(i));
        u.a[i] = logs ? std::exp(x) : x;
    }
    return u;
}

}  // namespace

Eigen::VectorXd full_qmle_score(const ModelSpec& spec, const TimeSeries& series, std::size_t start) {
    if (!spec.aarch().symmetric()) throw std::invalid_argument("full_qmle_score: requires beta = 0");
    const auto d = detail::make_design(series, spec.partition(), spec.p(), spec.q(), start);
    std::vector<double> a;
    for (double x : spec.aarch().alphas()) a.push_back(x * x);
    Eigen::VectorXd g;
    full_objective(d, spec.tar().coefficients(), spec.aarch().alpha0(), a, &g);
    return -g;
}

FitReport tar_arch_full_qmle(const TimeSeries& series, const ThresholdPartition& partition, std::size_t p,
                             std::size_t q, const FullQmleOptions& options) {
    if (q < 1) throw std::invalid_argument("tar_arch_full_qmle: q must be >= 1");
    const auto d = detail::make_design(series, partition, p, q, options.start);
    const auto k_theta = static_cast<Eigen::Index>(d.theta_size());
    const Eigen::Index dim = k_theta + 1 + static_cast<Eigen::Index>(q);
    if (d.size() <= static_cast<std::size_t>(dim)) throw DataError("tar_arch_full_qmle: too few observations");

    // Start from per-regime OLS and a moderate ARCH effect.
    FitOptions ols_opts;
    const auto ols = theta_step(series, partition, AarchParams::homoskedastic(1.0, q),
                                TarParams::zeros(partition.regimes(), p), ols_opts);
    std::vector<double> e(d.size());
    detail::compute_residuals(d, ols.coefficients(), e);
    const double var = detail::presample_variance(e);
    const double a_start = 0.1 / static_cast<double>(q);

    Eigen::VectorXd v0(dim);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d.regimes); ++j)
        v0.segment(j * static_cast<Eigen::Index>(d.width()), static_cast<Eigen::Index>(d.width())) =
            ols.coefficients().row(j).transpose();
    v0(k_theta) = std::log(var * (1.0 - a_start * static_cast<double>(q)));
    for (std::size_t i = 1; i <= q; ++i) v0(k_theta + static_cast<Eigen::Index>(i)) = std::log(a_start);

    const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) -> double {
        if (!v.allFinite() || v.tail(dim - k_theta).cwiseAbs().maxCoeff() > 700.0)
            return std::numeric_limits<double>::infinity();
        const auto u = unpack_natural(v, d, true);
        const double value = full_objective(d, u.theta, u.a0, u.a, grad);
        if (grad != nullptr) {
            (*grad)(k_theta) *= u.a0;
            for (std::size_t i = 0; i < q; ++i) (*grad)(k_theta + 1 + static_cast<Eigen::Index>(i)) *= u.a[i];
        }
        return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
    };
    const auto result = minimize_bfgs(objective, v0, options.optimizer);
    const auto est = unpack_natural(result.x, d, true);

    std::vector<double> alphas(q);
    for (std::size_t i = 0; i < q; ++i) alphas[i] = std::sqrt(est.a[i]);
    const auto form = VarianceForm::symmetric;
    FitReport report{.estimator = "full_symmetric",
                     .spec = ModelSpec(partition, TarParams(est.theta),
                                       AarchParams(est.a0, alphas, std::vector<double>(q, 0.0))),
                     .variance_form = form,
                     .param_names = parameter_names(partition.regimes(), p, q, form),
                     .qll = -result.value * static_cast<double>(d.size()),
                     .observations = d.size(),
                     .iterations = result.iterations,
                     .converged = result.converged};
    report.estimates = pack_parameters(report.spec, form);
    for (double f : result.trace) report.trace.push_back(-f * static_cast<double>(d.size()));
    report.trace.push_back(report.qll);

    if (!result.converged) {
        throw BestIterateError<FitReport>("tar_arch_full_qmle: " + result.message, std::move(report));
    }
    if (!options.compute_information) return report;

    // Sandwich in ARCH parameters: H by central differences of the analytic gradient.
    Eigen::VectorXd natural(dim);
    natural.head(k_theta) = result.x.head(k_theta);
    natural(k_theta) = est.a0;
    for (std::size_t i = 0; i < q; ++i) natural(k_theta + 1 + static_cast<Eigen::Index>(i)) = est.a[i];

    Eigen::MatrixXd hess(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        double step = 1e-5 * (1.0 + std::abs(natural(k)));
        if (k >= k_theta) step = std::min(step, 0.5 * natural(k));
        Eigen::VectorXd plus = natural;
        Eigen::VectorXd minus = natural;
        plus(k) += step;
        minus(k) -= step;
        Eigen::VectorXd gp;
        Eigen::VectorXd gm;
        const auto up = unpack_natural(plus, d, false);
        const auto um = unpack_natural(minus, d, false);
        full_objective(d, up.theta, up.a0, up.a, &gp);
        full_objective(d, um.theta, um.a0, um.a, &gm);
        hess.col(k) = (gp - gm) / (2.0 * step);  // Hessian of the mean negative qll
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Eigen::MatrixXd scores = observation_scores(d, est.theta, est.a0, est.a);
    const double count = static_cast<double>(d.size());
    const Eigen::MatrixXd outer = scores.transpose() * scores / count;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw IdentificationError("tar_arch_full_qmle: singular Hessian; weak identification");
    const Eigen::MatrixXd inv = lu.inverse();
    Eigen::MatrixXd cov = inv * outer * inv / count;

    // Delta method to alpha_i = sqrt(a_i).
    Eigen::VectorXd jac = Eigen::VectorXd::Ones(dim);
    for (std::size_t i = 0; i < q; ++i) jac(k_theta + 1 + static_cast<Eigen::Index>(i)) = 0.5 / alphas[i];
    cov = jac.asDiagonal() * cov * jac.asDiagonal();
    cov = 0.5 * (cov + cov.transpose()).eval();

    report.covariance = cov;
    report.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd info = (cov * count).ldlt().solve(Eigen::MatrixXd::Identity(dim, dim));
    report.info_matrix = 0.5 * (info + info.transpose());
    return report;
}

}  // namespace taraarch
