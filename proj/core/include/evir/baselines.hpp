#pragma once

#include "evir/single_index.hpp"

namespace evir {

/// Formula variants where the source text disagrees with the standard
/// estimator: `Corrected` uses the standard forms (default), `Paper`
/// reproduces the printed ones verbatim.
enum class Fidelity { Corrected, Paper };

/// Hill estimator from the top k log-spacings. `Corrected` divides by the
/// (n-k)-th order statistic; `Paper` divides by the k-th as printed.
double hill(const std::vector<double>& y, int k,
            Fidelity fidelity = Fidelity::Corrected);

/// Linear exceedance model alpha(x) = theta0 + x^T theta (the 1-index
/// parametric competitor), fitted by the same damped Newton.
struct LinearEviFit {
    double intercept = 0.0;
    Vector slopes;
    double tau = 0.0;
    double threshold_value = 0.0;
    Eigen::Index n_exceed = 0;
    NewtonReport newton;

    double alpha(const Vector& x) const { return intercept + x.dot(slopes); }
    double gamma(const Vector& x) const { return std::exp(-alpha(x)); }
};

LinearEviFit fit_linear_evi(const Dataset& data, const ThresholdSpec& spec);

/// (alpha-hat, gamma-hat) at a covariate row; gamma = exp(-alpha).
std::pair<double, double> predict_evi(const SingleIndexFit& fit, const Vector& x);
std::pair<double, double> predict_evi(const LinearEviFit& fit, const Vector& x);

/// Extrapolated tail quantile ((1-tau)/(1-tau_E))^{gamma-hat} * w_n.
/// `Paper` flips the exponent sign as printed.
double weissman_quantile(double gamma_hat, double threshold, double tau,
                         double tau_extreme, Fidelity fidelity = Fidelity::Corrected);

double weissman_quantile(const SingleIndexFit& fit, const Vector& x, double tau_extreme,
                         Fidelity fidelity = Fidelity::Corrected);

}  // namespace evir
