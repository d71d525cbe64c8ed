#include "concentrated.hpp"
#include "design.hpp"
#include "taraarch/error.hpp"
#include "taraarch/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace taraarch {

namespace {

constexpr double kKinkCutoff = 1e-8;

struct Layout {
    std::size_t q;
    VarianceForm form;
    Eigen::Index theta;  // number of mean parameters
    Eigen::Index alpha;  // number of variance parameters
};

/// dh_t / d(alpha0, alpha_i, beta_i) and the matching second derivatives.
void variance_derivatives(const detail::PathState& s, std::size_t t, const AarchParams& aarch, const Layout& lay,
                          Eigen::VectorXd& dh, Eigen::MatrixXd* d2h) {
    dh.setZero(lay.alpha);
    if (d2h != nullptr) d2h->setZero(lay.alpha, lay.alpha);
    dh(0) = 1.0;
    if (lay.form == VarianceForm::constant) return;
    const auto a = aarch.alphas();
    const auto b = aarch.betas();
    const auto beta_at = static_cast<Eigen::Index>(1 + lay.q);
    for (std::size_t i = 1; i <= lay.q; ++i) {
        const auto ia = static_cast<Eigen::Index>(i);
        const auto ib = beta_at + static_cast<Eigen::Index>(i - 1);
        const bool asym = lay.form == VarianceForm::asymmetric;
        if (t >= i) {
            const double e = s.e[t - i];
            const double u = a[i - 1] * std::abs(e) + b[i - 1] * e;
            dh(ia) = 2.0 * u * std::abs(e);
            if (asym) dh(ib) = 2.0 * u * e;
            if (d2h != nullptr) {
                (*d2h)(ia, ia) = 2.0 * e * e;
                if (asym) {
                    (*d2h)(ib, ib) = 2.0 * e * e;
                    (*d2h)(ia, ib) = (*d2h)(ib, ia) = 2.0 * std::abs(e) * e;
                }
            }
        } else {
            dh(ia) = 2.0 * a[i - 1] * s.presample;
            if (asym) dh(ib) = 2.0 * b[i - 1] * s.presample;
            if (d2h != nullptr) {
                (*d2h)(ia, ia) = 2.0 * s.presample;
                if (asym) (*d2h)(ib, ib) = 2.0 * s.presample;
            }
        }
    }
}

struct MeanScores {
    Eigen::VectorXd theta;
    Eigen::VectorXd alpha;
};

MeanScores mean_scores(const detail::Design& d, const detail::PathState& s, const AarchParams& aarch,
                       const Layout& lay, const std::vector<char>& keep, double count) {
    MeanScores out{Eigen::VectorXd::Zero(lay.theta), Eigen::VectorXd::Zero(lay.alpha)};
    const auto w = static_cast<Eigen::Index>(d.width());
    Eigen::VectorXd dh;
    for (std::size_t t = 0; t < d.size(); ++t) {
        if (keep[t] == 0) continue;
        const double c = s.e[t] / s.h[t];
        const auto base = static_cast<Eigen::Index>(d.regime[t]) * w;
        out.theta.segment(base, w) += c * d.z.row(static_cast<Eigen::Index>(t)).transpose();
        variance_derivatives(s, t, aarch, lay, dh, nullptr);
        out.alpha += (-0.5 * (1.0 / s.h[t] - s.e[t] * s.e[t] / (s.h[t] * s.h[t]))) * dh;
    }
    out.theta /= count;
    out.alpha /= count;
    return out;
}

AarchParams with_alpha_value(const AarchParams& aarch, const Layout& lay, Eigen::Index which, double value) {
    double alpha0 = aarch.alpha0();
    std::vector<double> a(aarch.alphas().begin(), aarch.alphas().end());
    std::vector<double> b(aarch.betas().begin(), aarch.betas().end());
    if (which == 0) {
        alpha0 = value;
    } else if (which <= static_cast<Eigen::Index>(lay.q)) {
        a[static_cast<std::size_t>(which - 1)] = value;
    } else {
        b[static_cast<std::size_t>(which - 1) - lay.q] = value;
    }
    return {alpha0, std::move(a), std::move(b)};
}

}  // namespace

InformationEstimate estimate_information(const TimeSeries& series, const ModelSpec& spec, VarianceForm form,
                                         std::size_t start) {
    const auto d = detail::make_design(series, spec.partition(), spec.p(), spec.q(), start);
    const Layout lay{spec.q(), form, static_cast<Eigen::Index>(d.theta_size()),
                     static_cast<Eigen::Index>(detail::alpha_size(spec.q(), form))};
    const Eigen::Index dim = lay.theta + lay.alpha;
    const auto w = static_cast<Eigen::Index>(d.width());
    const Eigen::MatrixXd& theta = spec.tar().coefficients();
    const AarchParams& aarch = spec.aarch();

    const auto base = detail::evaluate(d, theta, aarch);
    std::vector<char> keep(d.size(), 1);
    std::size_t kept = 0;
    for (std::size_t t = 0; t < d.size(); ++t) {
        keep[t] = std::abs(base.e[t]) >= kKinkCutoff ? 1 : 0;
        kept += static_cast<std::size_t>(keep[t]);
    }
    if (kept <= static_cast<std::size_t>(dim))
        throw IdentificationError("estimate_information: too few informative observations");
    const double count = static_cast<double>(kept);

    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd psi(dim);
    Eigen::VectorXd dh;
    Eigen::MatrixXd d2h;
    for (std::size_t t = 0; t < d.size(); ++t) {
        if (keep[t] == 0) continue;
        const double e = base.e[t];
        const double h = base.h[t];
        const auto zt = d.z.row(static_cast<Eigen::Index>(t)).transpose();
        const auto at = static_cast<Eigen::Index>(d.regime[t]) * w;

        psi.setZero();
        psi.segment(at, w) = (e / h) * zt;
        variance_derivatives(base, t, aarch, lay, dh, &d2h);
        const double c1 = -0.5 * (1.0 / h - e * e / (h * h));
        psi.tail(lay.alpha) = c1 * dh;
        outer.noalias() += psi * psi.transpose();

        jac.block(at, at, w, w).noalias() -= (1.0 / h) * zt * zt.transpose();
        const double c2 = -0.5 * (-1.0 / (h * h) + 2.0 * e * e / (h * h * h));
        jac.bottomRightCorner(lay.alpha, lay.alpha).noalias() += c1 * d2h + c2 * dh * dh.transpose();
    }
    outer /= count;
    jac /= count;

    // Cross blocks by central differences.
    for (Eigen::Index k = 0; k < lay.theta; ++k) {
        const Eigen::Index j = k / w;
        const Eigen::Index c = k % w;
        const double step = 1e-5 * (1.0 + std::abs(theta(j, c)));
        Eigen::MatrixXd plus = theta;
        Eigen::MatrixXd minus = theta;
        plus(j, c) += step;
        minus(j, c) -= step;
        const auto sp = mean_scores(d, detail::evaluate(d, plus, aarch), aarch, lay, keep, count);
        const auto sm = mean_scores(d, detail::evaluate(d, minus, aarch), aarch, lay, keep, count);
        jac.block(lay.theta, k, lay.alpha, 1) = (sp.alpha - sm.alpha) / (2.0 * step);
    }
    const Eigen::VectorXd natural = pack_parameters(spec, form).tail(lay.alpha);
    for (Eigen::Index k = 0; k < lay.alpha; ++k) {
        double step = 1e-5 * (1.0 + std::abs(natural(k)));
        if (k == 0) step = std::min(step, 0.5 * natural(0));
        const auto ap = with_alpha_value(aarch, lay, k, natural(k) + step);
        const auto am = with_alpha_value(aarch, lay, k, natural(k) - step);
        const auto sp = mean_scores(d, detail::evaluate(d, theta, ap), ap, lay, keep, count);
        const auto sm = mean_scores(d, detail::evaluate(d, theta, am), am, lay, keep, count);
        jac.block(0, lay.theta + k, lay.theta, 1) = (sp.theta - sm.theta) / (2.0 * step);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw IdentificationError(
            "estimate_information: singular derivative of the estimating equations; the parameters look "
            "weakly identified");
    }
    const Eigen::MatrixXd inv = lu.inverse();
    Eigen::MatrixXd cov = inv * outer * inv.transpose() / count;
    cov = 0.5 * (cov + cov.transpose()).eval();

    InformationEstimate out;
    out.param_names = parameter_names(spec.partition().regimes(), spec.p(), spec.q(), form);
    out.score_outer = std::move(outer);
    out.jacobian = std::move(jac);
    Eigen::MatrixXd scaled = cov * count;
    Eigen::MatrixXd info = scaled.ldlt().solve(Eigen::MatrixXd::Identity(dim, dim));
    out.info = 0.5 * (info + info.transpose());
    out.sandwich_cov = std::move(cov);
    out.observations = kept;
    return out;
}

}  // namespace taraarch
