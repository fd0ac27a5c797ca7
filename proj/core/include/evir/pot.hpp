#pragma once

#include <string>
#include <vector>

#include "evir/numerics.hpp"

namespace evir {

/// Immutable regression table: strictly positive responses and p covariates.
struct Dataset {
    Vector y;       // length n, all entries > 0
    Matrix x;       // n x p
    std::vector<std::string> column_names;  // optional, size p when present

    Eigen::Index n() const { return y.size(); }
    Eigen::Index p() const { return x.cols(); }
};

/// Threshold choice: a marginal quantile of y, or externally supplied
/// per-row values (the hook for conditional-quantile thresholds).
struct ThresholdSpec {
    enum class Kind { MarginalQuantile, External };
    Kind kind = Kind::MarginalQuantile;
    double tau = 0.9;
    Vector external;  // length n when kind == External

    static ThresholdSpec marginal(double tau) {
        return ThresholdSpec{Kind::MarginalQuantile, tau, {}};
    }
    static ThresholdSpec external_values(Vector values) {
        return ThresholdSpec{Kind::External, 0.0, std::move(values)};
    }
};

/// Rows with y above their threshold, with log relative excesses.
struct ExceedanceSet {
    std::vector<Eigen::Index> indices;
    Vector thresholds;   // per exceedance row
    Vector log_excess;   // log(y_i / w_i), all > 0
    Matrix x;            // covariate rows of the exceedances

    Eigen::Index count() const { return log_excess.size(); }
};

Vector realize_threshold(const Dataset& data, const ThresholdSpec& spec);

ExceedanceSet extract_exceedances(const Dataset& data, const Vector& thresholds);

/// Symmetric projection interval: [-max_i ||x_i||, +max_i ||x_i||], so that
/// x_i^T theta stays inside for every unit theta. Degenerate data widens
/// to (-1, 1).
std::pair<double, double> index_interval(const Dataset& data);

}  // namespace evir
