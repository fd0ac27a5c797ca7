#include "evir/single_index.hpp"

#include <cmath>
#include <limits>

namespace evir {

Vector to_theta(const Vector& phi) {
    const double norm2 = phi.squaredNorm();
    if (norm2 >= 1.0) throw InvalidInterval("to_theta: ||phi|| must be < 1");
    Vector theta(phi.size() + 1);
    theta(0) = std::sqrt(1.0 - norm2);
    theta.tail(phi.size()) = phi;
    return theta;
}

Vector to_phi(const Vector& theta) {
    if (!(theta(0) > 0.0)) {
        throw FirstCoordinateNotPositive("to_phi: theta_1 must be positive");
    }
    return theta.tail(theta.size() - 1);
}

double SingleIndexFit::alpha_at_index(double z) const {
    double window[32];
    const int first = basis.eval_nonzero(z, window);
    double value = 0.0;
    for (int j = 0; j <= basis.degree(); ++j) value += window[j] * b(first + j);
    return value;
}

double SingleIndexFit::gamma(const Vector& x) const { return std::exp(-alpha(x)); }

namespace {

// Unpenalized loss and phi-gradient at fixed spline coefficients.
// The spline derivative at clamped points is taken as zero: outside [a, b]
// the clamped loss is constant in the projected index.
struct ThetaObjective {
    const LossContext& ctx;
    const Vector& b;
    SplineBasis deriv_basis;
    Vector deriv_coefs;
    double proximal_nu;
    const Vector* theta_ref;

    ThetaObjective(const LossContext& ctx_in, const Vector& b_in, double nu,
                   const Vector* ref)
        : ctx(ctx_in),
          b(b_in),
          deriv_basis(ctx_in.basis->breakpoints(), ctx_in.basis->degree() - 1),
          deriv_coefs(),
          proximal_nu(nu),
          theta_ref(ref) {
        auto pair = eval_deriv_coeffs(*ctx.basis, b, 1);
        deriv_basis = pair.first;
        deriv_coefs = pair.second;
    }

    double value(const Vector& phi) const {
        const Vector theta = to_theta(phi);
        const auto& ex = *ctx.exceedances;
        double acc = 0.0;
        double window[32];
        for (Eigen::Index i = 0; i < ex.count(); ++i) {
            const double z = ex.x.row(i).dot(theta);
            const int first = ctx.basis->eval_nonzero(z, window);
            double s = 0.0;
            for (int j = 0; j <= ctx.basis->degree(); ++j) s += window[j] * b(first + j);
            acc += std::exp(s) * ex.log_excess(i) - s;
        }
        acc /= static_cast<double>(ctx.n_total);
        if (proximal_nu > 0.0 && theta_ref) {
            acc += proximal_nu * (theta - *theta_ref).squaredNorm();
        }
        return acc;
    }

    Vector gradient(const Vector& phi) const {
        const Vector theta = to_theta(phi);
        const double theta1 = theta(0);
        const auto& ex = *ctx.exceedances;
        const Eigen::Index q = phi.size();
        Vector g = Vector::Zero(q);
        double window[32];
        for (Eigen::Index i = 0; i < ex.count(); ++i) {
            const double z = ex.x.row(i).dot(theta);
            if (z <= ctx.basis->a() || z >= ctx.basis->b()) continue;
            int first = ctx.basis->eval_nonzero(z, window);
            double s = 0.0;
            for (int j = 0; j <= ctx.basis->degree(); ++j) s += window[j] * b(first + j);
            first = deriv_basis.eval_nonzero(z, window);
            double sd = 0.0;
            for (int j = 0; j <= deriv_basis.degree(); ++j) {
                sd += window[j] * deriv_coefs(first + j);
            }
            const double common =
                (std::exp(s) * ex.log_excess(i) - 1.0) * sd / static_cast<double>(ctx.n_total);
            // d z / d phi_k = x_{k+1} - (phi_k / theta_1) x_1
            const double x1 = ex.x(i, 0);
            for (Eigen::Index kk = 0; kk < q; ++kk) {
                g(kk) += common * (ex.x(i, kk + 1) - phi(kk) / theta1 * x1);
            }
        }
        if (proximal_nu > 0.0 && theta_ref) {
            const Vector diff = theta - *theta_ref;
            // J = d theta / d phi: first row -phi/theta_1, rest identity.
            for (Eigen::Index kk = 0; kk < q; ++kk) {
                g(kk) += 2.0 * proximal_nu * (diff(kk + 1) - diff(0) * phi(kk) / theta1);
            }
        }
        return g;
    }
};

constexpr double kPhiBall = 0.999;  // keeps theta_1 bounded away from 0

}  // namespace

Vector theta_step(const LossContext& ctx_unpenalized, const Vector& b,
                  const Vector& theta_init, double proximal_nu,
                  const Vector* theta_ref) {
    const Eigen::Index p = theta_init.size();
    if (p == 1) return Vector::Constant(1, 1.0);

    Vector theta0 = theta_init;
    if (theta0(0) < 0.0) theta0 = -theta0;
    if (theta0(0) == 0.0) {
        theta0(0) = 1e-12;
        theta0.normalize();
    }
    Vector phi = to_phi(theta0);
    if (phi.norm() > kPhiBall) phi *= kPhiBall / phi.norm();

    const ThetaObjective obj(ctx_unpenalized, b, proximal_nu, theta_ref);
    const Eigen::Index q = p - 1;

    Matrix h_inv = Matrix::Identity(q, q);
    double f = obj.value(phi);
    Vector g = obj.gradient(phi);

    const int max_iter = 200;
    for (int it = 0; it < max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= 1e-9) break;
        Vector dir = -(h_inv * g);
        double slope = g.dot(dir);
        if (slope >= 0.0) {  // reset a corrupted curvature estimate
            h_inv.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }

        double scale = 1.0;
        bool accepted = false;
        Vector phi_new;
        double f_new = f;
        for (int halve = 0; halve <= 40; ++halve) {
            phi_new = phi + scale * dir;
            if (phi_new.norm() > kPhiBall) {
                scale *= 0.5;
                continue;
            }
            f_new = obj.value(phi_new);
            if (f_new <= f + 1e-4 * scale * slope) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            if (it == 0) throw LineSearchFailed("theta_step: no descent direction");
            break;
        }

        const Vector g_new = obj.gradient(phi_new);
        const Vector s = phi_new - phi;
        const Vector yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const Vector hy = h_inv * yv;
            const double yhy = yv.dot(hy);
            // BFGS inverse update
            h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                     (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        phi = phi_new;
        g = g_new;
        if (std::abs(f - f_new) <= 1e-14 * (1.0 + std::abs(f))) {
            f = f_new;
            break;
        }
        f = f_new;
    }

    Vector theta = to_theta(phi);
    theta.normalize();
    if (theta(0) < 0.0) theta = -theta;
    return theta;
}

Vector initial_theta(const Dataset& data, const ExceedanceSet& exceedances) {
    const Eigen::Index p = data.p();
    Vector fallback = Vector::Zero(p);
    fallback(0) = 1.0;
    if (p == 1) return fallback;
    if (exceedances.count() < p + 2) return fallback;

    // Linear exceedance model on (1, x); only the slope direction is kept.
    Matrix design(exceedances.count(), p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = exceedances.x;
    Vector coef = Vector::Zero(p + 1);
    coef(0) = -std::log(std::max(exceedances.log_excess.mean(), 1e-300));
    try {
        newton_exceedance(design, exceedances.log_excess, nullptr, 0.0,
                          static_cast<double>(data.n()), coef, 1e-8, 100);
    } catch (const DidNotConverge&) {
        return fallback;
    }
    Vector slope = coef.tail(p);
    const double norm = slope.norm();
    if (norm < 1e-8) return fallback;
    slope /= norm;
    if (slope(0) < 0.0) slope = -slope;
    if (slope(0) == 0.0) return fallback;
    return slope;
}

SingleIndexFit fit(const Dataset& data, const FitConfig& config) {
    ThresholdSpec spec = config.external_thresholds
                             ? ThresholdSpec::external_values(*config.external_thresholds)
                             : ThresholdSpec::marginal(config.tau);
    const Vector thresholds = realize_threshold(data, spec);
    const ExceedanceSet exceed = extract_exceedances(data, thresholds);

    const auto [a, b_end] = index_interval(data);
    const int k0 = config.basis_dim - config.degree;
    if (k0 <= 1) throw TooFewKnots("fit: basis_dim must exceed degree + 1");
    const SplineBasis basis = make_basis(a, b_end, k0, config.degree);
    const PenaltyMatrix penalty = penalty_matrix(basis, config.penalty_order);

    const LossContext ctx{&exceed, &basis, &penalty, config.lambda, data.n()};
    const LossContext ctx0{&exceed, &basis, nullptr, 0.0, data.n()};

    Vector theta;
    if (config.theta_init) {
        theta = *config.theta_init;
        theta.normalize();
        if (theta(0) < 0.0) theta = -theta;
    } else {
        theta = initial_theta(data, exceed);
    }

    SingleIndexFit out{theta,
                       Vector(),
                       basis,
                       penalty,
                       config.lambda,
                       config.tau,
                       spec.kind == ThresholdSpec::Kind::MarginalQuantile
                           ? thresholds(0)
                           : std::numeric_limits<double>::quiet_NaN(),
                       exceed.count(),
                       data.n(),
                       {},
                       0.0,
                       false,
                       false,
                       {}};

    Vector b_coef = default_b_init(ctx);
    bool proximal = false;
    double nu = config.proximal_nu0;
    int non_monotone = 0;
    double prev_step_norm = std::numeric_limits<double>::infinity();

    for (int k = 0; k < config.max_outer_iter; ++k) {
        auto [b_new, report] =
            fit_b(ctx, theta, b_coef, config.newton_tol, config.newton_max_iter);
        b_coef = std::move(b_new);

        Vector theta_new;
        try {
            theta_new = theta_step(ctx0, b_coef, theta, proximal ? nu : 0.0,
                                   proximal ? &theta : nullptr);
        } catch (const LineSearchFailed&) {
            if (!proximal) {
                proximal = true;
                out.used_proximal = true;
                try {
                    theta_new = theta_step(ctx0, b_coef, theta, nu, &theta);
                } catch (const LineSearchFailed&) {
                    theta_new = theta;  // stalled even under the proximal objective
                }
            } else {
                theta_new = theta;  // stalled; convergence check below ends the loop
            }
        }
        if (proximal) nu *= config.proximal_growth;

        const double step_norm = (theta_new - theta).norm();
        out.trace.push_back({step_norm, report.final_loss, proximal});
        theta = theta_new;

        if (step_norm <= config.outer_tol) {
            out.converged = true;
            break;
        }
        if (step_norm >= prev_step_norm) {
            if (++non_monotone >= config.proximal_trigger && !proximal) {
                proximal = true;
                out.used_proximal = true;
                nu = config.proximal_nu0;
            }
        }
        prev_step_norm = step_norm;
    }

    auto [b_final, report] =
        fit_b(ctx, theta, b_coef, config.newton_tol, config.newton_max_iter);
    out.theta = theta;
    out.b = std::move(b_final);
    out.final_loss = report.final_loss;
    out.final_newton = report;
    if (!report.converged) out.converged = false;
    return out;
}

}  // namespace evir
