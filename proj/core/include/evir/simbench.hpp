#pragma once

#include <functional>
#include <string>

#include "evir/baselines.hpp"
#include "evir/tuning.hpp"

namespace evir {

/// The five data-generating processes of the simulation study.
/// Survival: P(Y > y | x) = y^{-1/gamma*(x)} / (1 + ell * y^{-1/gamma*(x)}),
/// gamma*(x) = exp(-alpha*(x)), covariates i.i.d. uniform on
/// [-1/sqrt(3), 1/sqrt(3)].
enum class SimModelId { I, II, III, IV, V };

SimModelId parse_sim_model_id(const std::string& name);  // "i".."v"
std::string to_string(SimModelId id);

struct SimModel {
    SimModelId id;
    int p;

    static SimModel make(SimModelId id, int p);

    double ell() const;            // Hall-class second-order constant
    Vector theta_true() const;     // normalize(1, 0.2, 0.5, 0, ...)
    double alpha_true(const Vector& x) const;
    double gamma_true(const Vector& x) const { return std::exp(-alpha_true(x)); }
    /// Analytic survival P(Y > y | x), for goodness-of-fit checks.
    double survival(double y, const Vector& x) const;
};

Dataset sample(const SimModel& model, int n, RandomStream& stream);

double true_alpha(const SimModel& model, const Vector& x);

struct MiseConfig {
    int test_points = 1000;  // J after trimming
    double trim_lower = 0.05;
    double trim_upper = 0.95;
};

/// Mean integrated squared relative error of gamma-hat over fresh test
/// covariates, trimmed to the central quantile band of the true index.
double mise(const std::function<double(const Vector&)>& gamma_hat,
            const SimModel& model, const MiseConfig& config, RandomStream stream);

enum class EstimatorId { SimD, SimM, Linear };

std::string to_string(EstimatorId id);

struct MonteCarloConfig {
    int reps = 50;
    TuningGrid grid = TuningGrid::defaults();
    FitConfig fit;
    MiseConfig mise;
    int threads = 1;
    std::uint64_t seed = 1;
};

struct MonteCarloRow {
    std::string method;
    int p = 0;
    int n = 0;
    int reps = 0;
    double mean_mise = 0.0;
    double sd_mise = 0.0;
    int failures = 0;
};

/// Seeded replication harness; per-replication substreams make the output
/// independent of the worker count.
std::vector<MonteCarloRow> monte_carlo(const SimModel& model, int n,
                                       const std::vector<EstimatorId>& estimators,
                                       const MonteCarloConfig& config);

enum class PeEstimator { SingleIndex, Linear };

struct PeConfig {
    int folds = 5;
    int repetitions = 100;
    FitConfig fit;                      // fixed (tau, lambda) per fold
    std::optional<TuningGrid> tune;     // when set, tune per training fold
    int threads = 1;
};

struct PeResult {
    double mean = 0.0;      // signed PE averaged over repetitions
    double sd = 0.0;
    double mean_abs = 0.0;  // |PE| averaged over repetitions
    int skipped_folds = 0;
};

/// Five-fold cross-validated prediction error of the exceedance
/// log-density, repeated with reshuffled folds.
PeResult prediction_error(const Dataset& data, PeEstimator estimator,
                          const PeConfig& config, std::uint64_t seed);

}  // namespace evir
