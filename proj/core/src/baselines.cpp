#include "evir/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace evir {

double hill(const std::vector<double>& y, int k, Fidelity fidelity) {
    const int n = static_cast<int>(y.size());
    if (k < 1 || k >= n) throw KOutOfRange("hill: need 1 <= k < n");
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    // Denominator: the (n-k)-th order statistic for the standard estimator,
    // the k-th for the printed formula.
    const double denom = (fidelity == Fidelity::Corrected) ? sorted[n - k - 1]
                                                           : sorted[k - 1];
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += std::log(sorted[n - i] / denom);
    return acc / static_cast<double>(k);
}

LinearEviFit fit_linear_evi(const Dataset& data, const ThresholdSpec& spec) {
    const Vector thresholds = realize_threshold(data, spec);
    const ExceedanceSet exceed = extract_exceedances(data, thresholds);
    const Eigen::Index p = data.p();
    if (exceed.count() < p + 2) {
        throw TooFewExceedances("fit_linear_evi: need at least p + 2 exceedances");
    }

    Matrix design(exceed.count(), p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = exceed.x;

    Vector coef = Vector::Zero(p + 1);
    coef(0) = -std::log(std::max(exceed.log_excess.mean(), 1e-300));
    NewtonReport report =
        newton_exceedance(design, exceed.log_excess, nullptr, 0.0,
                          static_cast<double>(data.n()), coef, 1e-8, 200);
    if (!report.converged) {
        throw DidNotConverge("fit_linear_evi: Newton did not reach tolerance");
    }

    LinearEviFit out;
    out.intercept = coef(0);
    out.slopes = coef.tail(p);
    out.tau = spec.kind == ThresholdSpec::Kind::MarginalQuantile ? spec.tau : 0.0;
    out.threshold_value = thresholds(0);
    out.n_exceed = exceed.count();
    out.newton = report;
    return out;
}

std::pair<double, double> predict_evi(const SingleIndexFit& fit, const Vector& x) {
    const double a = fit.alpha(x);
    return {a, std::exp(-a)};
}

std::pair<double, double> predict_evi(const LinearEviFit& fit, const Vector& x) {
    const double a = fit.alpha(x);
    return {a, std::exp(-a)};
}

double weissman_quantile(double gamma_hat, double threshold, double tau,
                         double tau_extreme, Fidelity fidelity) {
    if (!(tau > 0.0 && tau <= tau_extreme && tau_extreme < 1.0)) {
        throw InvalidLevels("weissman_quantile: need 0 < tau <= tau_E < 1");
    }
    const double ratio = (1.0 - tau) / (1.0 - tau_extreme);
    const double exponent = (fidelity == Fidelity::Corrected) ? gamma_hat : -gamma_hat;
    return std::pow(ratio, exponent) * threshold;
}

double weissman_quantile(const SingleIndexFit& fit, const Vector& x, double tau_extreme,
                         Fidelity fidelity) {
    const double gamma_hat = fit.gamma(x);
    return weissman_quantile(gamma_hat, fit.threshold_value, fit.tau, tau_extreme,
                             fidelity);
}

}  // namespace evir
