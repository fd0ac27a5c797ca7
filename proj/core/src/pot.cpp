#include "evir/pot.hpp"

#include <cmath>

namespace evir {

Vector realize_threshold(const Dataset& data, const ThresholdSpec& spec) {
    if (data.n() < 1) throw EmptyInput("realize_threshold: empty dataset");
    if (spec.kind == ThresholdSpec::Kind::External) {
        if (spec.external.size() != data.n()) {
            throw DataError("realize_threshold: external thresholds length mismatch");
        }
        if ((spec.external.array() <= 0.0).any()) {
            throw DataError("realize_threshold: external thresholds must be positive");
        }
        return spec.external;
    }
    if (!(spec.tau > 0.0 && spec.tau < 1.0)) {
        throw InvalidTau("realize_threshold: tau must lie in (0,1)");
    }
    std::vector<double> values(data.y.data(), data.y.data() + data.n());
    const double q = empirical_quantile(std::move(values), spec.tau);
    return Vector::Constant(data.n(), q);
}

ExceedanceSet extract_exceedances(const Dataset& data, const Vector& thresholds) {
    if (thresholds.size() != data.n()) {
        throw DataError("extract_exceedances: thresholds length mismatch");
    }
    ExceedanceSet out;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.y(i) > thresholds(i)) out.indices.push_back(i);
    }
    const Eigen::Index ne = static_cast<Eigen::Index>(out.indices.size());
    if (ne == 0) throw NoExceedances("extract_exceedances: no observation above threshold");
    out.thresholds.resize(ne);
    out.log_excess.resize(ne);
    out.x.resize(ne, data.p());
    for (Eigen::Index r = 0; r < ne; ++r) {
        const Eigen::Index i = out.indices[static_cast<std::size_t>(r)];
        out.thresholds(r) = thresholds(i);
        out.log_excess(r) = std::log(data.y(i) / thresholds(i));
        out.x.row(r) = data.x.row(i);
    }
    return out;
}

std::pair<double, double> index_interval(const Dataset& data) {
    if (data.n() < 1) throw EmptyInput("index_interval: empty dataset");
    double max_norm = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        max_norm = std::max(max_norm, data.x.row(i).norm());
    }
    if (max_norm < 1e-8) return {-1.0, 1.0};
    return {-max_norm, max_norm};
}

}  // namespace evir
