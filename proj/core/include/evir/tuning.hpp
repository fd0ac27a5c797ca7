#pragma once

#include <functional>
#include <optional>

#include "evir/random.hpp"
#include "evir/single_index.hpp"

namespace evir {

struct TuningGrid {
    std::vector<double> taus;     // strictly increasing, in (0,1)
    std::vector<double> lambdas;  // strictly increasing, >= 0

    /// tau in {0.90, ..., 0.99}, lambda 9 log-spaced points in [1e-6, 1e2].
    static TuningGrid defaults();
};

struct ScoreCell {
    double tau;
    double lambda;
    double score;  // NaN when the cell failed
    Eigen::Index n_exceed;
    bool converged;
    bool eligible;  // converged and n_exceed >= K + 5
};

struct ScoreTable {
    std::vector<ScoreCell> cells;  // tau-major, lambda ascending within tau
    int selected = -1;             // index into cells
};

/// Wang-Tsai discrepancy: squared distance of the sorted probability-integral
/// transforms U-hat from the uniform order-statistic means i/(N_e+1). With a
/// stream supplied, the reference is instead a sorted uniform sample
/// (the randomized variant of the score).
double discrepancy(const SingleIndexFit& fit, const Dataset& data,
                   RandomStream* randomized_reference = nullptr);

/// Same score for an arbitrary alpha-hat(x) at a constant threshold.
double discrepancy_alpha(const std::function<double(const Vector&)>& alpha,
                         double threshold_value, const Dataset& data,
                         RandomStream* randomized_reference = nullptr);

/// Fits every grid cell, warm-starting theta across lambda within each tau
/// column. Failed cells come back empty. Columns run in parallel when
/// `threads` > 1; results are deterministic regardless of thread count.
std::vector<std::optional<SingleIndexFit>> fit_grid(const Dataset& data,
                                                    const TuningGrid& grid,
                                                    const FitConfig& base,
                                                    int threads = 1);

/// Scores fitted cells and applies the eligibility and tie-break rules.
ScoreTable score_grid(const std::vector<std::optional<SingleIndexFit>>& fits,
                      const TuningGrid& grid, const Dataset& data);

struct SelectResult {
    double tau;
    double lambda;
    ScoreTable table;
    SingleIndexFit fit;
};

/// Grid search minimizing the discrepancy score over eligible cells.
/// Ties break toward larger tau, then larger lambda.
SelectResult select(const Dataset& data, const TuningGrid& grid,
                    const FitConfig& base, int threads = 1);

}  // namespace evir
