#include <benchmark/benchmark.h>

#include "evir/simbench.hpp"

using namespace evir;

namespace {

Dataset model_data(int n, std::uint64_t seed) {
    RandomStream stream(seed);
    return sample(SimModel::make(SimModelId::I, 3), n, stream);
}

void bm_spline_eval(benchmark::State& state) {
    const SplineBasis basis = make_basis(-1.0, 1.0, static_cast<int>(state.range(0)), 3);
    RandomStream stream(11);
    std::vector<double> xs(1024);
    for (auto& x : xs) x = stream.uniform(-1.0, 1.0);
    double values[8];
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(basis.eval_nonzero(xs[i++ & 1023], values));
    }
}
BENCHMARK(bm_spline_eval)->Arg(10)->Arg(37);

void bm_penalty_matrix(benchmark::State& state) {
    const SplineBasis basis = make_basis(-1.0, 1.0, static_cast<int>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(penalty_matrix(basis, 2));
    }
}
BENCHMARK(bm_penalty_matrix)->Arg(10)->Arg(37);

void bm_fit_b(benchmark::State& state) {
    const Dataset data = model_data(static_cast<int>(state.range(0)), 12);
    const SplineBasis basis = make_basis(-1.0, 1.0, 10, 3);
    const PenaltyMatrix penalty = penalty_matrix(basis, 2);
    const ExceedanceSet exceed = extract_exceedances(
        data, realize_threshold(data, ThresholdSpec::marginal(0.9)));
    const LossContext ctx{&exceed, &basis, &penalty, 0.1, data.n()};
    Vector theta = Vector::Zero(3);
    theta(0) = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_b(ctx, theta, default_b_init(ctx)));
    }
}
BENCHMARK(bm_fit_b)->Arg(1000)->Arg(4000);

void bm_fit_cold_start(benchmark::State& state) {
    const Dataset data = model_data(2000, 13);
    FitConfig config;
    config.basis_dim = 13;
    config.lambda = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(data, config));
    }
}
BENCHMARK(bm_fit_cold_start);

void bm_fit_warm_start(benchmark::State& state) {
    // warm start at the previous minimizer: the outer loop should terminate
    // in one or two iterations instead of the cold-start count
    const Dataset data = model_data(2000, 13);
    FitConfig config;
    config.basis_dim = 13;
    config.lambda = 0.1;
    const SingleIndexFit cold = fit(data, config);
    config.theta_init = cold.theta;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(data, config));
    }
}
BENCHMARK(bm_fit_warm_start);

void bm_tuning_select(benchmark::State& state) {
    const Dataset data = model_data(1000, 14);
    TuningGrid grid;
    grid.taus = {0.90, 0.93, 0.96};
    grid.lambdas = {1e-4, 1e-2, 1.0};
    FitConfig config;
    config.basis_dim = 13;
    for (auto _ : state) {
        benchmark::DoNotOptimize(select(data, grid, config));
    }
}
BENCHMARK(bm_tuning_select);

}  // namespace

BENCHMARK_MAIN();
