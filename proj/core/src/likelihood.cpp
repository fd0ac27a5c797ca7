#include "evir/likelihood.hpp"

#include <cmath>

namespace evir {

namespace {

double clip_eta(double eta, int* clips) {
    if (eta > kLinearPredictorClip) {
        if (clips) ++*clips;
        return kLinearPredictorClip;
    }
    if (eta < -kLinearPredictorClip) {
        if (clips) ++*clips;
        return -kLinearPredictorClip;
    }
    return eta;
}

// Data term and its derivatives at eta = design * beta.
double data_loss(const Matrix& design, const Vector& log_excess, double n_total,
                 const Vector& beta, int* clips) {
    const Vector eta = design * beta;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double e = clip_eta(eta(i), clips);
        acc += std::exp(e) * log_excess(i) - e;
    }
    return acc / n_total;
}

}  // namespace

int spline_design(const LossContext& ctx, const Vector& theta, Matrix& design) {
    const auto& ex = *ctx.exceedances;
    const auto& basis = *ctx.basis;
    const Eigen::Index ne = ex.count();
    design.setZero(ne, basis.dim());
    double window[32];
    int clamped_rows = 0;
    for (Eigen::Index i = 0; i < ne; ++i) {
        const double z = ex.x.row(i).dot(theta);
        bool clamped = false;
        const int first = basis.eval_nonzero(z, window, &clamped);
        clamped_rows += clamped ? 1 : 0;
        for (int j = 0; j <= basis.degree(); ++j) design(i, first + j) = window[j];
    }
    return clamped_rows;
}

double loss(const LossContext& ctx, const Vector& b, const Vector& theta) {
    Matrix design;
    spline_design(ctx, theta, design);
    double value = data_loss(design, ctx.exceedances->log_excess,
                             static_cast<double>(ctx.n_total), b, nullptr);
    if (ctx.lambda > 0.0 && ctx.penalty) {
        value += 0.5 * ctx.lambda * b.dot(ctx.penalty->matrix * b);
    }
    return value;
}

Vector gradient_b(const LossContext& ctx, const Vector& b, const Vector& theta) {
    Matrix design;
    spline_design(ctx, theta, design);
    const Vector& l = ctx.exceedances->log_excess;
    const Vector eta = design * b;
    Vector g = Vector::Zero(b.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double e = clip_eta(eta(i), nullptr);
        if (std::abs(eta(i)) >= kLinearPredictorClip) continue;  // flat region
        g += design.row(i).transpose() * (std::exp(e) * l(i) - 1.0);
    }
    g /= static_cast<double>(ctx.n_total);
    if (ctx.lambda > 0.0 && ctx.penalty) g += ctx.lambda * (ctx.penalty->matrix * b);
    return g;
}

Matrix hessian_b(const LossContext& ctx, const Vector& b, const Vector& theta) {
    Matrix design;
    spline_design(ctx, theta, design);
    const Vector& l = ctx.exceedances->log_excess;
    const Vector eta = design * b;
    Matrix h = Matrix::Zero(b.size(), b.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (std::abs(eta(i)) >= kLinearPredictorClip) continue;
        const double w = std::exp(eta(i)) * l(i);
        h.selfadjointView<Eigen::Lower>().rankUpdate(design.row(i).transpose(), w);
    }
    h = h.selfadjointView<Eigen::Lower>();
    h /= static_cast<double>(ctx.n_total);
    if (ctx.lambda > 0.0 && ctx.penalty) h += ctx.lambda * ctx.penalty->matrix;
    return h;
}

NewtonReport newton_exceedance(const Matrix& design, const Vector& log_excess,
                               const Matrix* penalty, double lambda,
                               double n_total, Vector& beta, double tol,
                               int max_iter) {
    NewtonReport report;
    const Eigen::Index k = beta.size();
    const bool penalized = penalty != nullptr && lambda > 0.0;

    auto eval_loss = [&](const Vector& v) {
        double value = data_loss(design, log_excess, n_total, v, &report.clip_events);
        if (penalized) value += 0.5 * lambda * v.dot(*penalty * v);
        return value;
    };

    double current = eval_loss(beta);
    for (int it = 0; it < max_iter; ++it) {
        report.iterations = it;

        const Vector eta = design * beta;
        Vector g = Vector::Zero(k);
        Matrix h = Matrix::Zero(k, k);
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            if (std::abs(eta(i)) >= kLinearPredictorClip) continue;
            const double w = std::exp(eta(i)) * log_excess(i);
            g += design.row(i).transpose() * (w - 1.0);
            h.selfadjointView<Eigen::Lower>().rankUpdate(design.row(i).transpose(), w);
        }
        h = h.selfadjointView<Eigen::Lower>();
        g /= n_total;
        h /= n_total;
        if (penalized) {
            g += lambda * (*penalty * beta);
            h += lambda * *penalty;
        }

        report.grad_max_norm = g.lpNorm<Eigen::Infinity>();
        if (report.grad_max_norm <= tol) {
            report.converged = true;
            break;
        }

        // Solve with ridge escalation when the Hessian is rank deficient
        // (knot spans with no exceedances at lambda = 0).
        Vector step;
        double ridge = 0.0;
        const double trace_scale = h.trace() / static_cast<double>(k);
        for (;;) {
            try {
                Matrix hr = h;
                if (ridge > 0.0) hr.diagonal().array() += ridge;
                step = solve_spd({std::move(hr), -g});
                break;
            } catch (const NotPositiveDefinite&) {
                ridge = (ridge == 0.0) ? 1e-8 * trace_scale : 2.0 * ridge;
                if (ridge > 1e-2 * trace_scale) {
                    throw DidNotConverge("newton_exceedance: Hessian unrecoverably singular");
                }
            }
        }
        report.ridge_used = std::max(report.ridge_used, ridge);

        // Armijo backtracking, factor 0.5, up to 30 halvings.
        const double slope = g.dot(step);
        double scale = 1.0;
        bool accepted = false;
        for (int halve = 0; halve <= 30; ++halve) {
            const Vector candidate = beta + scale * step;
            const double value = eval_loss(candidate);
            if (value <= current + 1e-4 * scale * slope) {
                beta = candidate;
                current = value;
                accepted = true;
                report.step_halvings += halve;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;  // no descent left at this precision
    }

    report.final_loss = current;
    const Vector eta = design * beta;
    report.clipping_active = (eta.array().abs() >= kLinearPredictorClip).any();
    return report;
}

Vector default_b_init(const LossContext& ctx) {
    const double mean_excess = ctx.exceedances->log_excess.mean();
    const double c = -std::log(std::max(mean_excess, 1e-300));
    return Vector::Constant(ctx.basis->dim(), c);
}

std::pair<Vector, NewtonReport> fit_b(const LossContext& ctx, const Vector& theta,
                                      const Vector& b_init, double tol, int max_iter) {
    Matrix design;
    spline_design(ctx, theta, design);
    Vector b = b_init;
    const Matrix* penalty = ctx.penalty ? &ctx.penalty->matrix : nullptr;
    NewtonReport report =
        newton_exceedance(design, ctx.exceedances->log_excess, penalty, ctx.lambda,
                          static_cast<double>(ctx.n_total), b, tol, max_iter);
    return {std::move(b), report};
}

}  // namespace evir
