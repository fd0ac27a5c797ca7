#include <iostream>

#include <CLI11.hpp>

#include "evir/commands.hpp"

namespace {

void add_ingest_flags(CLI::App* cmd, std::string& data, std::string& response,
                      bool& standardize, bool& drop_zero_response) {
    cmd->add_option("--data", data, "Input CSV with a header row")->required();
    cmd->add_option("--response", response, "Response column name");
    cmd->add_flag("--standardize", standardize, "Z-score each predictor column");
    cmd->add_flag("--drop-zero-response", drop_zero_response,
                  "Drop rows with response <= 0 (count reported)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-index extreme value index regression"};
    app.require_subcommand(1);

    evir::cli::FitOptions fit;
    evir::cli::TuneOptions tune;
    evir::cli::PredictOptions predict;
    evir::cli::SimulateOptions simulate;
    evir::cli::BenchOptions bench;
    double tau_e = 0.0;

    CLI::App* cmd_fit = app.add_subcommand("fit", "Fit the single-index spline model");
    add_ingest_flags(cmd_fit, fit.data, fit.response, fit.standardize,
                     fit.drop_zero_response);
    cmd_fit->add_option("--knots", fit.knots, "Spline basis dimension K");
    cmd_fit->add_option("--degree", fit.degree, "Spline degree");
    cmd_fit->add_option("--penalty-order", fit.penalty_order, "Derivative penalty order");
    cmd_fit->add_option("--tau", fit.tau, "Threshold quantile level in (0,1)");
    cmd_fit->add_option("--lambda", fit.lambda, "Roughness penalty weight");
    cmd_fit->add_option("--seed", fit.seed, "Random seed recorded in the manifest");
    cmd_fit->add_option("--out-dir", fit.out_dir, "Output directory");
    cmd_fit->add_option("--fidelity", fit.fidelity, "paper|corrected formula variants")
        ->check(CLI::IsMember({"paper", "corrected"}));

    CLI::App* cmd_tune =
        app.add_subcommand("tune", "Grid-search tau and lambda by discrepancy");
    add_ingest_flags(cmd_tune, tune.data, tune.response, tune.standardize,
                     tune.drop_zero_response);
    cmd_tune->add_option("--knots", tune.knots, "Spline basis dimension K");
    cmd_tune->add_option("--degree", tune.degree, "Spline degree");
    cmd_tune->add_option("--penalty-order", tune.penalty_order,
                         "Derivative penalty order");
    cmd_tune->add_option("--tau-grid", tune.tau_grid,
                         "start:end:step, e.g. 0.90:0.99:0.01");
    cmd_tune->add_option("--lambda-grid", tune.lambda_grid,
                         "lo:hi:count log-spaced, e.g. 1e-6:1e2:9");
    cmd_tune->add_option("--seed", tune.seed, "Random seed recorded in the manifest");
    cmd_tune->add_option("--threads", tune.threads, "Worker threads");
    cmd_tune->add_option("--out-dir", tune.out_dir, "Output directory");
    cmd_tune->add_option("--fidelity", tune.fidelity, "paper|corrected formula variants")
        ->check(CLI::IsMember({"paper", "corrected"}));

    CLI::App* cmd_predict =
        app.add_subcommand("predict", "Evaluate a saved fit on new covariates");
    cmd_predict->add_option("--fit", predict.fit, "fit.json produced by fit/tune")
        ->required();
    cmd_predict->add_option("--data", predict.data, "Covariate CSV with a header row")
        ->required();
    cmd_predict->add_option("--response", predict.response,
                            "Response column to drop if present");
    CLI::Option* tau_e_opt = cmd_predict->add_option(
        "--tau-e", tau_e, "Extrapolation level for Weissman quantiles");
    cmd_predict->add_option("--seed", predict.seed,
                            "Random seed recorded in the manifest");
    cmd_predict->add_option("--out-dir", predict.out_dir, "Output directory");

    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Draw a dataset from a simulation model");
    cmd_simulate->add_option("--model", simulate.model, "Model id i..v")
        ->check(CLI::IsMember({"i", "ii", "iii", "iv", "v"}));
    cmd_simulate->add_option("--n", simulate.n, "Sample size");
    cmd_simulate->add_option("--p", simulate.p, "Covariate dimension");
    cmd_simulate->add_option("--seed", simulate.seed, "Random seed");
    cmd_simulate->add_option("--out-dir", simulate.out_dir, "Output directory");

    CLI::App* cmd_bench =
        app.add_subcommand("bench", "Monte Carlo comparison of the estimators");
    cmd_bench->add_option("--model", bench.model, "Model id i..v")
        ->check(CLI::IsMember({"i", "ii", "iii", "iv", "v"}));
    cmd_bench->add_option("--n", bench.n, "Sample size per replication");
    cmd_bench->add_option("--p", bench.p, "Covariate dimension");
    cmd_bench->add_option("--reps", bench.reps, "Number of replications");
    cmd_bench->add_option("--knots", bench.knots, "Spline basis dimension K");
    cmd_bench->add_option("--degree", bench.degree, "Spline degree");
    cmd_bench->add_option("--penalty-order", bench.penalty_order,
                          "Derivative penalty order");
    cmd_bench->add_option("--tau-grid", bench.tau_grid,
                          "start:end:step, e.g. 0.90:0.99:0.01");
    cmd_bench->add_option("--lambda-grid", bench.lambda_grid,
                          "lo:hi:count log-spaced, e.g. 1e-6:1e2:9");
    cmd_bench->add_option("--method", bench.methods,
                          "Estimators to run (repeatable): sim-d, sim-m, linear");
    cmd_bench->add_option("--seed", bench.seed, "Random seed");
    cmd_bench->add_option("--threads", bench.threads, "Worker threads");
    cmd_bench->add_option("--out-dir", bench.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : evir::cli::kExitUsage;
    }

    if (cmd_fit->parsed()) return evir::cli::cmd_fit(fit, std::cerr);
    if (cmd_tune->parsed()) return evir::cli::cmd_tune(tune, std::cerr);
    if (cmd_predict->parsed()) {
        if (tau_e_opt->count() > 0) predict.tau_e = tau_e;
        return evir::cli::cmd_predict(predict, std::cerr);
    }
    if (cmd_simulate->parsed()) return evir::cli::cmd_simulate(simulate, std::cerr);
    if (cmd_bench->parsed()) return evir::cli::cmd_bench(bench, std::cerr);
    return evir::cli::kExitUsage;
}
