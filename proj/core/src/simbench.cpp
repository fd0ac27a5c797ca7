#include "evir/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "evir/parallel.hpp"

namespace evir {

namespace {

constexpr double kCovariateHalfWidth = 0.5773502691896258;  // 1/sqrt(3)

double gaussian_density(double z, double mu, double sigma) {
    const double u = (z - mu) / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * M_PI));
}

}  // namespace

SimModelId parse_sim_model_id(const std::string& name) {
    if (name == "i") return SimModelId::I;
    if (name == "ii") return SimModelId::II;
    if (name == "iii") return SimModelId::III;
    if (name == "iv") return SimModelId::IV;
    if (name == "v") return SimModelId::V;
    throw InvalidLevels("unknown simulation model id: " + name);
}

std::string to_string(SimModelId id) {
    switch (id) {
        case SimModelId::I: return "i";
        case SimModelId::II: return "ii";
        case SimModelId::III: return "iii";
        case SimModelId::IV: return "iv";
        case SimModelId::V: return "v";
    }
    return "?";
}

std::string to_string(EstimatorId id) {
    switch (id) {
        case EstimatorId::SimD: return "SIM-D";
        case EstimatorId::SimM: return "SIM-M";
        case EstimatorId::Linear: return "Linear";
    }
    return "?";
}

SimModel SimModel::make(SimModelId id, int p) {
    if (p < 1) throw WrongDimension("SimModel: p must be >= 1");
    if (id == SimModelId::V && p < 3) {
        throw WrongDimension("SimModel: model v needs p >= 3");
    }
    return SimModel{id, p};
}

double SimModel::ell() const {
    switch (id) {
        case SimModelId::I: return 0.0;
        case SimModelId::II: return 0.5;
        default: return 0.25;
    }
}

Vector SimModel::theta_true() const {
    Vector theta = Vector::Zero(p);
    const double raw[3] = {1.0, 0.2, 0.5};
    for (int j = 0; j < std::min(p, 3); ++j) theta(j) = raw[j];
    theta.normalize();
    return theta;
}

double SimModel::alpha_true(const Vector& x) const {
    if (x.size() != p) throw WrongDimension("alpha_true: covariate dimension mismatch");
    switch (id) {
        case SimModelId::I:
        case SimModelId::II:
            return 1.2 + 2.0 * x.dot(theta_true());
        case SimModelId::III: {
            const double z = x.dot(theta_true());
            const double c = std::cos(z);
            return 1.5 + 2.0 * c * c;
        }
        case SimModelId::IV: {
            const double z = x.dot(theta_true());
            return -3.0 + gaussian_density(z, -0.3, 0.2) + gaussian_density(z, 0.3, 0.2);
        }
        case SimModelId::V:
            return -1.2 - x(0) * (1.0 - x(2)) * std::sin(2.0 * M_PI * x(1));
    }
    return 0.0;
}

double SimModel::survival(double y, const Vector& x) const {
    const double g = gamma_true(x);
    const double t = std::pow(y, -1.0 / g);
    return std::clamp(t / (1.0 + ell() * t), 0.0, 1.0);
}

double true_alpha(const SimModel& model, const Vector& x) {
    return model.alpha_true(x);
}

Dataset sample(const SimModel& model, int n, RandomStream& stream) {
    if (n < 1) throw EmptyInput("sample: n must be >= 1");
    Dataset data;
    data.x.resize(n, model.p);
    data.y.resize(n);
    const double l = model.ell();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < model.p; ++j) {
            data.x(i, j) = stream.uniform(-kCovariateHalfWidth, kCovariateHalfWidth);
        }
        const double g = model.gamma_true(data.x.row(i).transpose());
        const double u = 1.0 - stream.uniform();  // in (0, 1]
        const double t = u / (1.0 - l * u);       // analytic survival inverse
        data.y(i) = std::pow(t, -g);
    }
    data.column_names.resize(model.p);
    for (int j = 0; j < model.p; ++j) data.column_names[j] = "x" + std::to_string(j + 1);
    return data;
}

double mise(const std::function<double(const Vector&)>& gamma_hat,
            const SimModel& model, const MiseConfig& config, RandomStream stream) {
    const int j_target = config.test_points;
    if (j_target < 1) throw EmptyInput("mise: test_points must be >= 1");
    const Vector theta = model.theta_true();

    const double keep = config.trim_upper - config.trim_lower;
    const int pool_size = std::max(j_target + 50, static_cast<int>(j_target / keep) + 50);

    auto draw_row = [&](Vector& x) {
        for (int j = 0; j < model.p; ++j) {
            x(j) = stream.uniform(-kCovariateHalfWidth, kCovariateHalfWidth);
        }
    };

    std::vector<Vector> pool(pool_size, Vector(model.p));
    std::vector<double> projections(pool_size);
    for (int i = 0; i < pool_size; ++i) {
        draw_row(pool[i]);
        projections[i] = pool[i].dot(theta);
    }
    const double lo = empirical_quantile(projections, config.trim_lower);
    const double hi = empirical_quantile(projections, config.trim_upper);

    double acc = 0.0;
    int kept = 0;
    for (int i = 0; i < pool_size && kept < j_target; ++i) {
        const double z = pool[i].dot(theta);
        if (z < lo || z > hi) continue;
        const double ratio = gamma_hat(pool[i]) / model.gamma_true(pool[i]);
        acc += (ratio - 1.0) * (ratio - 1.0);
        ++kept;
    }
    // Pad with fresh draws filtered by the same band.
    Vector x(model.p);
    long guard = 1000L * j_target;
    while (kept < j_target && guard-- > 0) {
        draw_row(x);
        const double z = x.dot(theta);
        if (z < lo || z > hi) continue;
        const double ratio = gamma_hat(x) / model.gamma_true(x);
        acc += (ratio - 1.0) * (ratio - 1.0);
        ++kept;
    }
    return acc / static_cast<double>(kept);
}

namespace {

// Linear baseline with the threshold level chosen by the discrepancy score.
LinearEviFit tuned_linear(const Dataset& data, const std::vector<double>& taus) {
    bool found = false;
    LinearEviFit best_fit;
    double best_score = std::numeric_limits<double>::infinity();
    for (const double tau : taus) {
        try {
            LinearEviFit candidate = fit_linear_evi(data, ThresholdSpec::marginal(tau));
            const double score = discrepancy_alpha(
                [&candidate](const Vector& x) { return candidate.alpha(x); },
                candidate.threshold_value, data);
            if (score <= best_score) {
                best_score = score;
                best_fit = std::move(candidate);
                found = true;
            }
        } catch (const Error&) {
            // level rejected
        }
    }
    if (!found) throw AllCellsFailed("tuned_linear: no threshold level worked");
    return best_fit;
}

}  // namespace

std::vector<MonteCarloRow> monte_carlo(const SimModel& model, int n,
                                       const std::vector<EstimatorId>& estimators,
                                       const MonteCarloConfig& config) {
    if (config.reps < 1) throw EmptyInput("monte_carlo: reps must be >= 1");
    const bool needs_grid =
        std::find(estimators.begin(), estimators.end(), EstimatorId::SimD) != estimators.end() ||
        std::find(estimators.begin(), estimators.end(), EstimatorId::SimM) != estimators.end();

    const std::size_t n_est = estimators.size();
    std::vector<std::vector<double>> mises(
        n_est, std::vector<double>(config.reps, std::numeric_limits<double>::quiet_NaN()));

    const RandomStream root(config.seed);
    parallel_for(static_cast<std::size_t>(config.reps), config.threads, [&](std::size_t r) {
        const RandomStream rep = root.substream(r);
        RandomStream train_stream = rep.substream(0);
        const RandomStream test_stream = rep.substream(1);
        const RandomStream oracle_stream = rep.substream(2);

        const Dataset data = sample(model, n, train_stream);

        std::vector<std::optional<SingleIndexFit>> fits;
        if (needs_grid) {
            fits = fit_grid(data, config.grid, config.fit, 1);
        }

        for (std::size_t e = 0; e < n_est; ++e) {
            try {
                switch (estimators[e]) {
                    case EstimatorId::SimD: {
                        const ScoreTable table = score_grid(fits, config.grid, data);
                        if (table.selected < 0) throw AllCellsFailed("SIM-D: no cell");
                        const auto& f = *fits[static_cast<std::size_t>(table.selected)];
                        mises[e][r] = mise([&f](const Vector& x) { return f.gamma(x); },
                                           model, config.mise, test_stream);
                        break;
                    }
                    case EstimatorId::SimM: {
                        // Oracle tuning: pick the cell minimizing MISE on an
                        // independent evaluation stream.
                        int best = -1;
                        double best_mise = std::numeric_limits<double>::infinity();
                        for (std::size_t idx = 0; idx < fits.size(); ++idx) {
                            if (!fits[idx] || !fits[idx]->converged) continue;
                            const auto& f = *fits[idx];
                            const double value =
                                mise([&f](const Vector& x) { return f.gamma(x); },
                                     model, config.mise, oracle_stream);
                            if (value < best_mise) {
                                best_mise = value;
                                best = static_cast<int>(idx);
                            }
                        }
                        if (best < 0) throw AllCellsFailed("SIM-M: no cell");
                        const auto& f = *fits[static_cast<std::size_t>(best)];
                        mises[e][r] = mise([&f](const Vector& x) { return f.gamma(x); },
                                           model, config.mise, test_stream);
                        break;
                    }
                    case EstimatorId::Linear: {
                        const LinearEviFit f = tuned_linear(data, config.grid.taus);
                        mises[e][r] = mise([&f](const Vector& x) { return f.gamma(x); },
                                           model, config.mise, test_stream);
                        break;
                    }
                }
            } catch (const Error&) {
                // recorded as a failure below
            }
        }
    });

    std::vector<MonteCarloRow> rows;
    rows.reserve(n_est);
    for (std::size_t e = 0; e < n_est; ++e) {
        MonteCarloRow row;
        row.method = to_string(estimators[e]);
        row.p = model.p;
        row.n = n;
        row.reps = config.reps;
        double sum = 0.0;
        int good = 0;
        for (const double v : mises[e]) {
            if (std::isnan(v)) {
                ++row.failures;
            } else {
                sum += v;
                ++good;
            }
        }
        if (good > 0) {
            row.mean_mise = sum / good;
            double ss = 0.0;
            for (const double v : mises[e]) {
                if (!std::isnan(v)) ss += (v - row.mean_mise) * (v - row.mean_mise);
            }
            row.sd_mise = good > 1 ? std::sqrt(ss / (good - 1)) : 0.0;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

PeResult prediction_error(const Dataset& data, PeEstimator estimator,
                          const PeConfig& config, std::uint64_t seed) {
    if (data.n() < 10) throw EmptyInput("prediction_error: need n >= 10");
    if (config.folds < 2) throw EmptyInput("prediction_error: need >= 2 folds");

    const Eigen::Index n = data.n();
    std::vector<double> pe_values(config.repetitions,
                                  std::numeric_limits<double>::quiet_NaN());
    std::vector<int> skipped(config.repetitions, 0);
    const RandomStream root(seed);

    parallel_for(static_cast<std::size_t>(config.repetitions), config.threads,
                 [&](std::size_t rep) {
        RandomStream stream = root.substream(rep);
        std::vector<Eigen::Index> order(n);
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        for (Eigen::Index i = n - 1; i > 0; --i) {
            const auto j = static_cast<Eigen::Index>(
                stream.uniform_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }

        double fold_sum = 0.0;
        int fold_count = 0;
        for (int f = 0; f < config.folds; ++f) {
            const Eigen::Index begin = n * f / config.folds;
            const Eigen::Index end = n * (f + 1) / config.folds;

            Dataset train;
            train.y.resize(n - (end - begin));
            train.x.resize(n - (end - begin), data.p());
            Eigen::Index t = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i >= begin && i < end) continue;
                train.y(t) = data.y(order[i]);
                train.x.row(t) = data.x.row(order[i]);
                ++t;
            }

            std::function<double(const Vector&)> alpha_hat;
            double threshold = 0.0;
            try {
                if (estimator == PeEstimator::SingleIndex) {
                    auto shared = std::make_shared<SingleIndexFit>(
                        config.tune ? select(train, *config.tune, config.fit, 1).fit
                                    : fit(train, config.fit));
                    threshold = shared->threshold_value;
                    alpha_hat = [shared](const Vector& x) { return shared->alpha(x); };
                } else {
                    auto shared = std::make_shared<LinearEviFit>(
                        fit_linear_evi(train, ThresholdSpec::marginal(config.fit.tau)));
                    threshold = shared->threshold_value;
                    alpha_hat = [shared](const Vector& x) { return shared->alpha(x); };
                }
            } catch (const Error&) {
                ++skipped[rep];
                continue;
            }

            // Mean exceedance log-density over the held-out fold.
            double acc = 0.0;
            int count = 0;
            for (Eigen::Index i = begin; i < end; ++i) {
                const double y = data.y(order[i]);
                if (y <= threshold) continue;
                const Vector x = data.x.row(order[i]).transpose();
                const double a = alpha_hat(x);
                acc += a - std::exp(a) * std::log(y / threshold) - std::log(y);
                ++count;
            }
            if (count == 0) {
                ++skipped[rep];
                continue;
            }
            fold_sum += 1.0 / (acc / count);
            ++fold_count;
        }
        if (fold_count > 0) pe_values[rep] = fold_sum / fold_count;
    });

    PeResult out;
    double sum = 0.0, abs_sum = 0.0;
    int good = 0;
    for (int rep = 0; rep < config.repetitions; ++rep) {
        out.skipped_folds += skipped[rep];
        if (std::isnan(pe_values[rep])) continue;
        sum += pe_values[rep];
        abs_sum += std::abs(pe_values[rep]);
        ++good;
    }
    if (good == 0) throw DidNotConverge("prediction_error: all repetitions failed");
    out.mean = sum / good;
    out.mean_abs = abs_sum / good;
    double ss = 0.0;
    for (int rep = 0; rep < config.repetitions; ++rep) {
        if (!std::isnan(pe_values[rep])) ss += (pe_values[rep] - out.mean) * (pe_values[rep] - out.mean);
    }
    out.sd = good > 1 ? std::sqrt(ss / (good - 1)) : 0.0;
    return out;
}

}  // namespace evir
