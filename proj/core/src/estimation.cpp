#include "taraarch/estimation.hpp"

#include "concentrated.hpp"
#include "design.hpp"
#include "taraarch/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace taraarch {

namespace detail {

ThetaSolve solve_theta(const Design& d, const AarchParams& aarch, Eigen::MatrixXd theta, int max_passes,
                       double tol) {
    const auto w = static_cast<Eigen::Index>(d.width());
    for (std::size_t j = 0; j < d.regimes; ++j) {
        if (d.counts[j] == 0) throw IdentificationError("theta step: regime " + std::to_string(j) + " is empty");
        if (d.counts[j] < d.width()) {
            throw IdentificationError("theta step: regime " + std::to_string(j) + " has " +
                                      std::to_string(d.counts[j]) + " observations, need at least p+1 = " +
                                      std::to_string(d.width()));
        }
    }

    ThetaSolve out;
    std::vector<double> e(d.size());
    std::vector<double> h(d.size());
    std::vector<Eigen::MatrixXd> normal(d.regimes);
    std::vector<Eigen::VectorXd> rhs(d.regimes);
    for (out.passes = 1; out.passes <= max_passes; ++out.passes) {
        compute_residuals(d, theta, e);
        compute_variance(aarch, e, presample_variance(e), h);

        for (std::size_t j = 0; j < d.regimes; ++j) {
            normal[j].setZero(w, w);
            rhs[j].setZero(w);
        }
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double wt = 1.0 / h[i];
            const auto zi = d.z.row(static_cast<Eigen::Index>(i));
            auto& a = normal[d.regime[i]];
            for (Eigen::Index r = 0; r < w; ++r) {
                const double zr = wt * zi(r);
                for (Eigen::Index c = 0; c <= r; ++c) a(r, c) += zr * zi(c);
            }
            rhs[d.regime[i]].noalias() += (wt * d.y[i]) * zi.transpose();
        }

        Eigen::MatrixXd next(theta.rows(), theta.cols());
        for (std::size_t j = 0; j < d.regimes; ++j) {
            Eigen::MatrixXd a = normal[j].selfadjointView<Eigen::Lower>();
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
            qr.setThreshold(1e-13);
            if (qr.rank() < w) {
                throw IdentificationError("theta step: singular design matrix in regime " + std::to_string(j));
            }
            next.row(static_cast<Eigen::Index>(j)) = qr.solve(rhs[j]).transpose();
        }
        const double delta = (next - theta).lpNorm<Eigen::Infinity>();
        theta = std::move(next);
        if (!theta.allFinite()) throw IdentificationError("theta step: non-finite coefficients");
        if (delta < tol) {
            out.converged = true;
            break;
        }
    }
    out.passes = std::min(out.passes, max_passes);
    out.theta = std::move(theta);
    return out;
}

std::size_t alpha_size(std::size_t q, VarianceForm form) noexcept {
    switch (form) {
        case VarianceForm::asymmetric: return 1 + 2 * q;
        case VarianceForm::symmetric: return 1 + q;
        case VarianceForm::constant: return 1;
    }
    return 1;
}

AarchParams restrict_form(const AarchParams& aarch, VarianceForm form) {
    std::vector<double> a(aarch.alphas().begin(), aarch.alphas().end());
    std::vector<double> b(aarch.betas().begin(), aarch.betas().end());
    if (form != VarianceForm::asymmetric) std::fill(b.begin(), b.end(), 0.0);
    if (form == VarianceForm::constant) std::fill(a.begin(), a.end(), 0.0);
    return {aarch.alpha0(), std::move(a), std::move(b)};
}

AarchParams canonical_aarch(const AarchParams& aarch) {
    std::vector<double> a(aarch.order());
    std::vector<double> b(aarch.order());
    for (std::size_t i = 0; i < aarch.order(); ++i) {
        // (a|e| + b e)^2 only depends on |a + b| and |a - b|.
        const double up = std::abs(aarch.alphas()[i] + aarch.betas()[i]);
        const double down = std::abs(aarch.alphas()[i] - aarch.betas()[i]);
        a[i] = 0.5 * (up + down);
        b[i] = 0.5 * (up - down);
    }
    return {aarch.alpha0(), std::move(a), std::move(b)};
}

Eigen::VectorXd alpha_gradient(std::span<const double> e, std::span<const double> h, double presample,
                               const AarchParams& aarch, VarianceForm form) {
    const std::size_t q = aarch.order();
    const auto a = aarch.alphas();
    const auto b = aarch.betas();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(alpha_size(q, form)));
    const auto beta_at = static_cast<Eigen::Index>(1 + q);
    for (std::size_t t = 0; t < e.size(); ++t) {
        const double c = -0.5 * (1.0 / h[t] - e[t] * e[t] / (h[t] * h[t]));
        g(0) += c;
        if (form == VarianceForm::constant) continue;
        for (std::size_t i = 1; i <= q; ++i) {
            double da;
            double db;
            if (t >= i) {
                const double ei = e[t - i];
                const double u = a[i - 1] * std::abs(ei) + b[i - 1] * ei;
                da = 2.0 * u * std::abs(ei);
                db = 2.0 * u * ei;
            } else {
                da = 2.0 * a[i - 1] * presample;
                db = 2.0 * b[i - 1] * presample;
            }
            g(static_cast<Eigen::Index>(i)) += c * da;
            if (form == VarianceForm::asymmetric) g(beta_at + static_cast<Eigen::Index>(i - 1)) += c * db;
        }
    }
    return g;
}

namespace {

// The likelihood sees (alpha_i, beta_i) only through the ARCH coefficients
// (alpha_i + beta_i)^2 and (alpha_i - beta_i)^2, so the optimizer works on their
// logs. In (alpha, beta) coordinates every point with alpha_i = |beta_i| is a
// spurious stationary point, and fits could stall there.
AarchParams decode_alpha(const Eigen::VectorXd& v, std::size_t q, VarianceForm form) {
    std::vector<double> a(q, 0.0);
    std::vector<double> b(q, 0.0);
    const auto at = [&](std::size_t i) { return v(static_cast<Eigen::Index>(1 + i)); };
    for (std::size_t i = 0; i < q && form != VarianceForm::constant; ++i) {
        if (form == VarianceForm::symmetric) {
            a[i] = std::exp(0.5 * at(i));
        } else {
            const double up = std::exp(0.5 * at(i));
            const double down = std::exp(0.5 * at(q + i));
            a[i] = 0.5 * (up + down);
            b[i] = 0.5 * (up - down);
        }
    }
    return {std::exp(v(0)), std::move(a), std::move(b)};
}

Eigen::VectorXd encode_alpha(const AarchParams& aarch, VarianceForm form) {
    constexpr double floor = 1e-12;
    const std::size_t q = aarch.order();
    Eigen::VectorXd v(static_cast<Eigen::Index>(alpha_size(q, form)));
    v(0) = std::log(aarch.alpha0());
    for (std::size_t i = 0; i < q && form != VarianceForm::constant; ++i) {
        const double a = aarch.alphas()[i];
        const double b = form == VarianceForm::asymmetric ? aarch.betas()[i] : 0.0;
        v(static_cast<Eigen::Index>(1 + i)) = std::log(std::max((a + b) * (a + b), floor));
        if (form == VarianceForm::asymmetric)
            v(static_cast<Eigen::Index>(1 + q + i)) = std::log(std::max((a - b) * (a - b), floor));
    }
    return v;
}

// Maps a gradient in (alpha0, alpha, beta) to the optimizer coordinates.
void to_log_gradient(Eigen::VectorXd& g, const AarchParams& aarch, VarianceForm form) {
    const std::size_t q = aarch.order();
    g(0) *= aarch.alpha0();
    for (std::size_t i = 0; i < q && form != VarianceForm::constant; ++i) {
        const auto ia = static_cast<Eigen::Index>(1 + i);
        const double a = aarch.alphas()[i];
        if (form == VarianceForm::symmetric) {
            g(ia) *= 0.5 * a;
        } else {
            const auto ib = static_cast<Eigen::Index>(1 + q + i);
            const double b = aarch.betas()[i];
            const double ga = g(ia);
            const double gb = g(ib);
            g(ia) = 0.25 * std::abs(a + b) * (ga + gb);
            g(ib) = 0.25 * std::abs(a - b) * (ga - gb);
        }
    }
}

}  // namespace

AlphaSolve solve_alpha(std::span<const double> e, const AarchParams& init, VarianceForm form,
                       const BfgsOptions& options) {
    const std::size_t q = init.order();
    const double presample = presample_variance(e);
    const double scale = 1.0 / static_cast<double>(e.size());
    std::vector<double> h(e.size());

    const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) -> double {
        if (!v.allFinite() || v.cwiseAbs().maxCoeff() > 700.0) return std::numeric_limits<double>::infinity();
        const AarchParams aarch = decode_alpha(v, q, form);
        compute_variance(aarch, e, presample, h);
        const double value = -quasi_loglik(e, h) * scale;
        if (grad != nullptr) {
            *grad = -scale * alpha_gradient(e, h, presample, aarch, form);
            to_log_gradient(*grad, aarch, form);
        }
        return value;
    };

    AarchParams start = restrict_form(init, form);
    if (form != VarianceForm::constant && start.persistence() == 0.0) {
        // alpha_i = beta_i = 0 is a stationary point of the likelihood; step off it.
        start = AarchParams(start.alpha0(), std::vector<double>(q, 0.1), std::vector<double>(q, 0.0));
    }
    const auto result = minimize_bfgs(objective, encode_alpha(start, form), options);
    AlphaSolve out{canonical_aarch(decode_alpha(result.x, q, form)), result.converged,
                   result.gradient.lpNorm<Eigen::Infinity>(), result.iterations};
    return out;
}

}  // namespace detail

double qll_term(double eps, double h) { return -0.5 * (std::log(h) + eps * eps / h); }

double gaussian_qll(const ModelSpec& spec, const TimeSeries& series, std::size_t start) {
    const auto d = detail::make_design(series, spec.partition(), spec.p(), spec.q(), start);
    const auto s = detail::evaluate(d, spec.tar().coefficients(), spec.aarch());
    if (!std::isfinite(s.qll)) throw DataError("gaussian_qll: non-finite quasi-likelihood");
    return s.qll;
}

TarParams theta_step(const TimeSeries& series, const ThresholdPartition& partition, const AarchParams& aarch,
                     const TarParams& theta_init, const FitOptions& options) {
    if (theta_init.regimes() != partition.regimes())
        throw std::invalid_argument("theta_step: theta_init does not match the partition");
    const auto d = detail::make_design(series, partition, theta_init.order(), aarch.order(), options.start);
    auto solved = detail::solve_theta(d, aarch, theta_init.coefficients(), options.max_irls_passes, options.irls_tol);
    if (!solved.converged) {
        throw BestIterateError<TarParams>("theta_step: IRLS did not converge in " +
                                              std::to_string(options.max_irls_passes) + " passes",
                                          TarParams(std::move(solved.theta)));
    }
    return TarParams(std::move(solved.theta));
}

AarchParams alpha_step(const TimeSeries& series, const ThresholdPartition& partition, const TarParams& tar,
                       const AarchParams& aarch_init, const FitOptions& options) {
    const auto d = detail::make_design(series, partition, tar.order(), aarch_init.order(), options.start);
    std::vector<double> e(d.size());
    detail::compute_residuals(d, tar.coefficients(), e);
    auto solved = detail::solve_alpha(e, aarch_init, options.variance_form, options.alpha_optimizer);
    if (!solved.converged) {
        throw BestIterateError<AarchParams>("alpha_step: optimizer did not converge (gradient norm " +
                                                std::to_string(solved.gradient_norm) + ")",
                                            std::move(solved.aarch));
    }
    return std::move(solved.aarch);
}

namespace {

AarchParams starting_aarch(double residual_variance, std::size_t q, VarianceForm form) {
    // The variance recursion is stationary in (alpha_i, beta_i) at zero, so the
    // search starts from a moderate ARCH effect instead.
    const double a = form == VarianceForm::constant ? 0.0 : 0.3 / std::sqrt(static_cast<double>(q));
    const double alpha0 = std::max(residual_variance * (1.0 - a * a * static_cast<double>(q)), 1e-12);
    return {alpha0, std::vector<double>(q, a), std::vector<double>(q, 0.0)};
}

}  // namespace

FitReport fit_alternating(const TimeSeries& series, const ThresholdPartition& partition, std::size_t p,
                          std::size_t q, const std::optional<ModelSpec>& init, const FitOptions& options) {
    if (q < 1) throw std::invalid_argument("fit_alternating: q must be >= 1");
    const auto form = options.variance_form;
    const auto d = detail::make_design(series, partition, p, q, options.start);
    const auto names = parameter_names(partition.regimes(), p, q, form);
    if (d.size() <= names.size()) {
        throw DataError("fit_alternating: " + std::to_string(d.size()) + " usable observations for " +
                        std::to_string(names.size()) + " parameters");
    }

    Eigen::MatrixXd theta;
    AarchParams aarch = AarchParams::homoskedastic(1.0, q);
    if (init) {
        if (init->p() != p || init->q() != q || init->partition().regimes() != partition.regimes())
            throw std::invalid_argument("fit_alternating: init does not match (partition, p, q)");
        theta = init->tar().coefficients();
        aarch = detail::restrict_form(init->aarch(), form);
    } else {
        const auto ols = detail::solve_theta(d, aarch, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.regimes),
                                                                           static_cast<Eigen::Index>(p + 1)),
                                             options.max_irls_passes, options.irls_tol);
        theta = ols.theta;
        std::vector<double> e(d.size());
        detail::compute_residuals(d, theta, e);
        aarch = starting_aarch(detail::presample_variance(e), q, form);
    }

    FitReport report{.estimator = "concentrated",
                     .spec = ModelSpec(partition, TarParams(theta), aarch),
                     .variance_form = form,
                     .param_names = names,
                     .observations = d.size()};

    bool outer_converged = false;
    bool steps_converged = true;
    double previous = -std::numeric_limits<double>::infinity();
    int iteration = 0;
    while (iteration < options.max_outer_iterations) {
        ++iteration;
        auto ts = detail::solve_theta(d, aarch, std::move(theta), options.max_irls_passes, options.irls_tol);
        theta = std::move(ts.theta);
        std::vector<double> e(d.size());
        detail::compute_residuals(d, theta, e);
        auto as = detail::solve_alpha(e, aarch, form, options.alpha_optimizer);
        aarch = std::move(as.aarch);
        steps_converged = ts.converged && as.converged;

        const double current = detail::evaluate(d, theta, aarch).qll;
        if (!std::isfinite(current)) throw DataError("fit_alternating: non-finite quasi-likelihood");
        report.trace.push_back(current);
        if (std::abs(current - previous) < options.outer_relative_tol * std::abs(current)) {
            outer_converged = true;
            break;
        }
        previous = current;
    }

    // Finish on a theta step so the returned mean parameters solve the estimating
    // equations at the returned variance parameters.
    auto final_theta = detail::solve_theta(d, aarch, std::move(theta), options.max_irls_passes, options.irls_tol);
    steps_converged = steps_converged && final_theta.converged;
    report.spec = ModelSpec(partition, TarParams(std::move(final_theta.theta)), aarch);
    report.qll = detail::evaluate(d, report.spec.tar().coefficients(), aarch).qll;
    report.trace.push_back(report.qll);
    report.iterations = iteration;
    report.converged = outer_converged && steps_converged;
    report.estimates = pack_parameters(report.spec, form);

    if (!report.converged) {
        throw BestIterateError<FitReport>("fit_alternating: no convergence after " + std::to_string(iteration) +
                                              " outer iterations",
                                          std::move(report));
    }

    if (options.compute_information) {
        auto info = estimate_information(series, report.spec, form, d.start);
        report.covariance = std::move(info.sandwich_cov);
        report.info_matrix = std::move(info.info);
        report.std_errors = report.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    return report;
}

Eigen::VectorXd concentrated_equations(const ModelSpec& spec, const TimeSeries& series, std::size_t start) {
    const auto d = detail::make_design(series, spec.partition(), spec.p(), spec.q(), start);
    return detail::theta_equations(d, detail::evaluate(d, spec.tar().coefficients(), spec.aarch()));
}

Eigen::VectorXd alpha_score(const ModelSpec& spec, const TimeSeries& series, VarianceForm form, std::size_t start) {
    const auto d = detail::make_design(series, spec.partition(), spec.p(), spec.q(), start);
    const auto s = detail::evaluate(d, spec.tar().coefficients(), spec.aarch());
    return detail::alpha_gradient(s.e, s.h, s.presample, spec.aarch(), form);
}

}  // namespace taraarch
