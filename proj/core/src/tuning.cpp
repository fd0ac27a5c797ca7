#include "evir/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evir/parallel.hpp"

namespace evir {

TuningGrid TuningGrid::defaults() {
    TuningGrid grid;
    for (int i = 0; i < 10; ++i) grid.taus.push_back(0.90 + 0.01 * i);
    for (int i = 0; i < 9; ++i) grid.lambdas.push_back(std::pow(10.0, -6.0 + i));
    return grid;
}

double discrepancy_alpha(const std::function<double(const Vector&)>& alpha,
                         double threshold_value, const Dataset& data,
                         RandomStream* randomized_reference) {
    const Vector thresholds = Vector::Constant(data.n(), threshold_value);
    const ExceedanceSet exceed = extract_exceedances(data, thresholds);
    const Eigen::Index ne = exceed.count();
    if (ne < 2) throw TooFewExceedances("discrepancy: need at least 2 exceedances");

    std::vector<double> u(static_cast<std::size_t>(ne));
    for (Eigen::Index i = 0; i < ne; ++i) {
        const double a = alpha(exceed.x.row(i).transpose());
        u[static_cast<std::size_t>(i)] = std::exp(-std::exp(a) * exceed.log_excess(i));
    }
    std::sort(u.begin(), u.end());

    std::vector<double> reference(u.size());
    if (randomized_reference) {
        for (auto& r : reference) r = randomized_reference->uniform();
        std::sort(reference.begin(), reference.end());
    } else {
        // Expected uniform order statistics i/(N_e + 1).
        for (std::size_t i = 0; i < reference.size(); ++i) {
            reference[i] = static_cast<double>(i + 1) / static_cast<double>(ne + 1);
        }
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - reference[i];
        acc += d * d;
    }
    return acc / static_cast<double>(ne);
}

double discrepancy(const SingleIndexFit& fit, const Dataset& data,
                   RandomStream* randomized_reference) {
    if (std::isnan(fit.threshold_value)) {
        throw DataError("discrepancy: fit carries no scalar threshold value");
    }
    return discrepancy_alpha([&fit](const Vector& x) { return fit.alpha(x); },
                             fit.threshold_value, data, randomized_reference);
}

std::vector<std::optional<SingleIndexFit>> fit_grid(const Dataset& data,
                                                    const TuningGrid& grid,
                                                    const FitConfig& base,
                                                    int threads) {
    if (grid.taus.empty() || grid.lambdas.empty()) {
        throw EmptyInput("fit_grid: empty tuning grid");
    }
    const std::size_t n_tau = grid.taus.size();
    const std::size_t n_lambda = grid.lambdas.size();
    std::vector<std::optional<SingleIndexFit>> fits(n_tau * n_lambda);

    // One task per tau column; theta warm-starts across lambda within it.
    parallel_for(n_tau, threads, [&](std::size_t ti) {
        std::optional<Vector> warm_theta;
        for (std::size_t li = 0; li < n_lambda; ++li) {
            FitConfig config = base;
            config.tau = grid.taus[ti];
            config.lambda = grid.lambdas[li];
            config.theta_init = warm_theta ? warm_theta : base.theta_init;
            try {
                SingleIndexFit cell = fit(data, config);
                warm_theta = cell.theta;
                fits[ti * n_lambda + li] = std::move(cell);
            } catch (const Error&) {
                // failed cell: left empty, recorded during scoring
            }
        }
    });
    return fits;
}

ScoreTable score_grid(const std::vector<std::optional<SingleIndexFit>>& fits,
                      const TuningGrid& grid, const Dataset& data) {
    const std::size_t n_lambda = grid.lambdas.size();
    ScoreTable table;
    table.cells.reserve(fits.size());
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < fits.size(); ++idx) {
        ScoreCell cell{grid.taus[idx / n_lambda], grid.lambdas[idx % n_lambda],
                       std::numeric_limits<double>::quiet_NaN(), 0, false, false};
        if (fits[idx]) {
            const auto& f = *fits[idx];
            cell.n_exceed = f.n_exceed;
            cell.converged = f.converged;
            cell.eligible = f.converged && f.n_exceed >= f.basis.dim() + 5;
            try {
                cell.score = discrepancy(f, data);
            } catch (const TooFewExceedances&) {
                cell.eligible = false;
            }
            // Cells are visited tau-major ascending, lambda ascending, so
            // <= breaks ties toward larger tau then larger lambda.
            if (cell.eligible && cell.score <= best_score) {
                best_score = cell.score;
                best = static_cast<int>(idx);
            }
        }
        table.cells.push_back(cell);
    }
    table.selected = best;
    return table;
}

SelectResult select(const Dataset& data, const TuningGrid& grid,
                    const FitConfig& base, int threads) {
    auto fits = fit_grid(data, grid, base, threads);
    ScoreTable table = score_grid(fits, grid, data);
    if (table.selected < 0) throw AllCellsFailed("select: no eligible grid cell");
    const auto idx = static_cast<std::size_t>(table.selected);
    return SelectResult{table.cells[idx].tau, table.cells[idx].lambda,
                        std::move(table), std::move(*fits[idx])};
}

}  // namespace evir
