#pragma once

#include "evir/pot.hpp"
#include "evir/splines.hpp"

namespace evir {

/// Everything the exceedance loss needs besides the optimization variables.
/// Non-owning; the referenced objects must outlive the context.
struct LossContext {
    const ExceedanceSet* exceedances;
    const SplineBasis* basis;
    const PenaltyMatrix* penalty;
    double lambda;
    Eigen::Index n_total;  // the loss normalizer is the full sample size
};

struct NewtonReport {
    int iterations = 0;
    double grad_max_norm = 0.0;
    double final_loss = 0.0;
    int step_halvings = 0;
    bool converged = false;
    int clip_events = 0;       // linear-predictor clips seen during the solve
    bool clipping_active = false;  // any clip at the returned iterate
    double ridge_used = 0.0;
};

/// Clip bound for the linear predictor inside exp().
inline constexpr double kLinearPredictorClip = 40.0;

/// Spline design matrix B(x_i^T theta) over the exceedance rows. Returns the
/// number of rows whose projected index fell outside [a, b] and was clamped.
int spline_design(const LossContext& ctx, const Vector& theta, Matrix& design);

double loss(const LossContext& ctx, const Vector& b, const Vector& theta);
Vector gradient_b(const LossContext& ctx, const Vector& b, const Vector& theta);
Matrix hessian_b(const LossContext& ctx, const Vector& b, const Vector& theta);

/// Damped Newton for the strictly convex b-subproblem at fixed theta.
std::pair<Vector, NewtonReport> fit_b(const LossContext& ctx, const Vector& theta,
                                      const Vector& b_init, double tol = 1e-8,
                                      int max_iter = 100);

/// Closed-form scalar starting point: constant spline at -log(mean log-excess).
Vector default_b_init(const LossContext& ctx);

/// Shared Newton core: minimizes
///   (1/n) sum_i [exp(eta_i) L_i - eta_i] + (lambda/2) beta^T P beta
/// with eta = design * beta, over the exceedance rows. `penalty` may be null
/// (lambda is then ignored). Used by both the spline fit and the linear
/// baseline.
NewtonReport newton_exceedance(const Matrix& design, const Vector& log_excess,
                               const Matrix* penalty, double lambda,
                               double n_total, Vector& beta, double tol,
                               int max_iter);

}  // namespace evir
