#pragma once

#include <optional>
#include <vector>

#include "evir/likelihood.hpp"

namespace evir {

/// theta(phi) = (sqrt(1 - ||phi||^2), phi^T)^T: the unit-norm, positive-first-
/// coordinate constraint written as an unconstrained (p-1)-vector.
Vector to_theta(const Vector& phi);
Vector to_phi(const Vector& theta);

struct FitConfig {
    int basis_dim = 40;     // K; the spline space has K0 = K - degree spans
    int degree = 3;
    int penalty_order = 2;
    double lambda = 1.0;
    double tau = 0.9;
    std::optional<Vector> external_thresholds;  // overrides tau when set
    double outer_tol = 1e-6;
    int max_outer_iter = 100;
    int proximal_trigger = 30;  // non-monotone outer iterations before the proximal switch
    double proximal_nu0 = 0.01;
    double proximal_growth = 1.2;
    double newton_tol = 1e-8;
    int newton_max_iter = 100;
    std::optional<Vector> theta_init;
};

struct OuterIteration {
    double theta_step_norm;
    double loss;
    bool proximal;
};

struct SingleIndexFit {
    Vector theta;        // ||theta|| = 1, theta(0) > 0
    Vector b;
    SplineBasis basis;
    PenaltyMatrix penalty;
    double lambda = 0.0;
    double tau = 0.0;
    double threshold_value = 0.0;  // NaN for external per-row thresholds
    Eigen::Index n_exceed = 0;
    Eigen::Index n_total = 0;
    std::vector<OuterIteration> trace;
    double final_loss = 0.0;
    bool converged = false;
    bool used_proximal = false;
    NewtonReport final_newton;

    /// alpha-hat at the projected index (clamped to the basis interval).
    double alpha_at_index(double z) const;
    double alpha(const Vector& x) const { return alpha_at_index(x.dot(theta)); }
    double gamma(const Vector& x) const;
};

/// One Step-3 update: minimizes the unpenalized loss over theta at fixed b
/// by BFGS in phi-coordinates with the analytic chain-rule gradient. When
/// `proximal_nu > 0`, minimizes the proximal objective around `theta_ref`.
Vector theta_step(const LossContext& ctx_unpenalized, const Vector& b,
                  const Vector& theta_init, double proximal_nu = 0.0,
                  const Vector* theta_ref = nullptr);

/// Slope direction of the linear exceedance model, used as theta^(0);
/// falls back to the first coordinate axis for degenerate slopes.
Vector initial_theta(const Dataset& data, const ExceedanceSet& exceedances);

/// The full alternating fit: b-step / theta-step loop, proximal fallback,
/// and the final penalized b-step at the converged theta.
SingleIndexFit fit(const Dataset& data, const FitConfig& config);

}  // namespace evir
