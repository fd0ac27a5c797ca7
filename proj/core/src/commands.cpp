#include "evir/commands.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <json.hpp>

#include "evir/io.hpp"
#include "evir/simbench.hpp"
#include "evir/tuning.hpp"

namespace evir::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double parse_number(const std::string& text) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size() ||
        !std::isfinite(value)) {
        throw InvalidLevels("grid: not a number: '" + text + "'");
    }
    return value;
}

std::array<std::string, 3> split_grid_spec(const std::string& text) {
    const std::size_t first = text.find(':');
    const std::size_t second = first == std::string::npos ? first : text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        text.find(':', second + 1) != std::string::npos) {
        throw InvalidLevels("grid: expected three ':'-separated fields, got '" + text + "'");
    }
    return {text.substr(0, first), text.substr(first + 1, second - first - 1),
            text.substr(second + 1)};
}

Fidelity parse_fidelity(const std::string& text) {
    if (text == "corrected") return Fidelity::Corrected;
    if (text == "paper") return Fidelity::Paper;
    throw InvalidLevels("--fidelity must be 'paper' or 'corrected', got '" + text + "'");
}

/// Maps library exceptions onto the documented exit codes.
int run_command(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const NoExceedances& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const TooFewExceedances& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const EmptyInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const DidNotConverge& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const AllCellsFailed& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const LineSearchFailed& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const NotPositiveDefinite& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

TuningGrid make_grid(const std::string& tau_grid, const std::string& lambda_grid) {
    TuningGrid grid = TuningGrid::defaults();
    if (!tau_grid.empty()) grid.taus = parse_linear_grid(tau_grid);
    if (!lambda_grid.empty()) grid.lambdas = parse_log_grid(lambda_grid);
    for (double tau : grid.taus) {
        if (!(tau > 0.0 && tau < 1.0)) throw InvalidTau("tau grid value outside (0,1)");
    }
    for (double lambda : grid.lambdas) {
        if (!(lambda >= 0.0)) throw InvalidLevels("lambda grid value below 0");
    }
    return grid;
}

void write_score_table_csv(const std::string& path, const ScoreTable& table) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path);
    out << "tau,lambda,D,n_exceed,converged,eligible,selected\n";
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const ScoreCell& cell = table.cells[i];
        out << format_double(cell.tau) << ',' << format_double(cell.lambda) << ',';
        if (std::isnan(cell.score)) {
            out << "NA";
        } else {
            out << format_double(cell.score);
        }
        out << ',' << cell.n_exceed << ',' << (cell.converged ? 1 : 0) << ','
            << (cell.eligible ? 1 : 0) << ','
            << (static_cast<int>(i) == table.selected ? 1 : 0) << '\n';
    }
}

json ingest_config_json(const std::string& data, const std::string& response,
                        bool standardize, bool drop_zero_response) {
    return json{{"data", data},
                {"response", response},
                {"standardize", standardize},
                {"drop_zero_response", drop_zero_response}};
}

}  // namespace

std::vector<double> parse_linear_grid(const std::string& text) {
    const auto fields = split_grid_spec(text);
    const double start = parse_number(fields[0]);
    const double end = parse_number(fields[1]);
    const double step = parse_number(fields[2]);
    if (step <= 0.0 || end < start) {
        throw InvalidLevels("grid: need start <= end and step > 0 in '" + text + "'");
    }
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((end - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(start + step * i);
    return out;
}

std::vector<double> parse_log_grid(const std::string& text) {
    const auto fields = split_grid_spec(text);
    const double lo = parse_number(fields[0]);
    const double hi = parse_number(fields[1]);
    const double count_d = parse_number(fields[2]);
    const int count = static_cast<int>(count_d);
    if (lo <= 0.0 || hi < lo || count < 1 || count_d != count) {
        throw InvalidLevels("grid: need 0 < lo <= hi and integer count >= 1 in '" + text +
                            "'");
    }
    std::vector<double> out;
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    const double log_lo = std::log10(lo);
    const double log_hi = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        out.push_back(std::pow(10.0, log_lo + (log_hi - log_lo) * i / (count - 1)));
    }
    return out;
}

int cmd_fit(const FitOptions& options, std::ostream& err) {
    return run_command(err, [&]() {
        const Fidelity fidelity = parse_fidelity(options.fidelity);
        if (!(options.tau > 0.0 && options.tau < 1.0)) {
            throw InvalidTau("--tau must lie in (0,1)");
        }
        IngestOptions ingest{options.response, options.standardize,
                             options.drop_zero_response};
        IngestReport report;
        const Dataset data = ingest_csv(options.data, ingest, &report);

        fs::create_directories(options.out_dir);
        json config = ingest_config_json(options.data, options.response,
                                         options.standardize, options.drop_zero_response);
        config["knots"] = options.knots;
        config["degree"] = options.degree;
        config["penalty_order"] = options.penalty_order;
        config["tau"] = options.tau;
        config["lambda"] = options.lambda;
        config["fidelity"] = options.fidelity;
        config["rows_dropped"] = report.rows_dropped;
        write_manifest(options.out_dir, "fit", config.dump(), options.seed,
                       {{options.data, file_digest(options.data)}});

        FitConfig fit_config;
        fit_config.basis_dim = options.knots;
        fit_config.degree = options.degree;
        fit_config.penalty_order = options.penalty_order;
        fit_config.tau = options.tau;
        fit_config.lambda = options.lambda;
        const SingleIndexFit result = fit(data, fit_config);
        save_fit((fs::path(options.out_dir) / "fit.json").string(), result, fidelity);
        if (!result.converged) {
            err << "warning: alternating fit did not converge; fit.json retained with "
                   "converged=false\n";
            return kExitConvergence;
        }
        return kExitOk;
    });
}

int cmd_tune(const TuneOptions& options, std::ostream& err) {
    return run_command(err, [&]() {
        const Fidelity fidelity = parse_fidelity(options.fidelity);
        IngestOptions ingest{options.response, options.standardize,
                             options.drop_zero_response};
        const Dataset data = ingest_csv(options.data, ingest);
        const TuningGrid grid = make_grid(options.tau_grid, options.lambda_grid);

        fs::create_directories(options.out_dir);
        json config = ingest_config_json(options.data, options.response,
                                         options.standardize, options.drop_zero_response);
        config["knots"] = options.knots;
        config["degree"] = options.degree;
        config["penalty_order"] = options.penalty_order;
        config["tau_grid"] = grid.taus;
        config["lambda_grid"] = grid.lambdas;
        config["threads"] = options.threads;
        config["fidelity"] = options.fidelity;
        write_manifest(options.out_dir, "tune", config.dump(), options.seed,
                       {{options.data, file_digest(options.data)}});

        FitConfig base;
        base.basis_dim = options.knots;
        base.degree = options.degree;
        base.penalty_order = options.penalty_order;

        auto fits = fit_grid(data, grid, base, options.threads);
        const ScoreTable table = score_grid(fits, grid, data);
        write_score_table_csv((fs::path(options.out_dir) / "score_table.csv").string(),
                              table);
        if (table.selected < 0) {
            throw AllCellsFailed("tune: no eligible grid cell; see score_table.csv");
        }
        const auto idx = static_cast<std::size_t>(table.selected);
        const SingleIndexFit& best = *fits[idx];

        json selected{{"tau", table.cells[idx].tau},
                      {"lambda", table.cells[idx].lambda},
                      {"D", table.cells[idx].score},
                      {"n_exceed", table.cells[idx].n_exceed}};
        std::ofstream sel(fs::path(options.out_dir) / "selected.json");
        if (!sel) throw DataError("cannot open selected.json in " + options.out_dir);
        sel << selected.dump(2) << '\n';

        save_fit((fs::path(options.out_dir) / "fit.json").string(), best, fidelity);
        return kExitOk;
    });
}

int cmd_predict(const PredictOptions& options, std::ostream& err) {
    return run_command(err, [&]() {
        if (options.tau_e && !(*options.tau_e > 0.0 && *options.tau_e < 1.0)) {
            throw InvalidTau("--tau-e must lie in (0,1)");
        }
        const LoadedFit loaded = load_fit(options.fit);
        const Matrix x = ingest_csv_matrix(options.data, options.response);
        if (x.cols() != loaded.fit.theta.size()) {
            throw WrongDimension("predict: data has " + std::to_string(x.cols()) +
                                 " predictors, fit expects " +
                                 std::to_string(loaded.fit.theta.size()));
        }
        if (options.tau_e && std::isnan(loaded.fit.threshold_value)) {
            throw DataError(
                "predict: fit carries per-row thresholds; Weissman extrapolation "
                "needs a scalar threshold");
        }

        fs::create_directories(options.out_dir);
        json config{{"fit", options.fit}, {"data", options.data},
                    {"response", options.response}};
        if (options.tau_e) config["tau_e"] = *options.tau_e;
        write_manifest(options.out_dir, "predict", config.dump(), options.seed,
                       {{options.fit, file_digest(options.fit)},
                        {options.data, file_digest(options.data)}});

        std::ofstream out(fs::path(options.out_dir) / "predictions.csv");
        if (!out) throw DataError("cannot open predictions.csv in " + options.out_dir);
        out << "row,index,alpha,gamma";
        if (options.tau_e) out << ",quantile";
        out << '\n';
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const Vector xi = x.row(i).transpose();
            const double z = xi.dot(loaded.fit.theta);
            const auto [alpha, gamma] = predict_evi(loaded.fit, xi);
            out << (i + 1) << ',' << format_double(z) << ',' << format_double(alpha)
                << ',' << format_double(gamma);
            if (options.tau_e) {
                out << ',' << format_double(weissman_quantile(loaded.fit, xi,
                                                              *options.tau_e,
                                                              loaded.fidelity));
            }
            out << '\n';
        }
        return kExitOk;
    });
}

int cmd_simulate(const SimulateOptions& options, std::ostream& err) {
    return run_command(err, [&]() {
        if (options.n < 1) throw InvalidLevels("--n must be positive");
        const SimModel model = SimModel::make(parse_sim_model_id(options.model), options.p);

        fs::create_directories(options.out_dir);
        json config{{"model", options.model}, {"n", options.n}, {"p", options.p}};
        write_manifest(options.out_dir, "simulate", config.dump(), options.seed, {});

        RandomStream stream(options.seed);
        const Dataset data = sample(model, options.n, stream);
        write_dataset_csv((fs::path(options.out_dir) / "data.csv").string(), data);
        return kExitOk;
    });
}

int cmd_bench(const BenchOptions& options, std::ostream& err) {
    return run_command(err, [&]() {
        if (options.n < 1) throw InvalidLevels("--n must be positive");
        if (options.reps < 1) throw InvalidLevels("--reps must be positive");
        const SimModel model = SimModel::make(parse_sim_model_id(options.model), options.p);
        std::vector<EstimatorId> estimators;
        for (const std::string& name : options.methods) {
            if (name == "sim-d") {
                estimators.push_back(EstimatorId::SimD);
            } else if (name == "sim-m") {
                estimators.push_back(EstimatorId::SimM);
            } else if (name == "linear") {
                estimators.push_back(EstimatorId::Linear);
            } else {
                throw InvalidLevels("--method must be sim-d, sim-m, or linear, got '" +
                                    name + "'");
            }
        }

        MonteCarloConfig config;
        config.reps = options.reps;
        config.grid = make_grid(options.tau_grid, options.lambda_grid);
        config.fit.basis_dim = options.knots;
        config.fit.degree = options.degree;
        config.fit.penalty_order = options.penalty_order;
        config.threads = options.threads;
        config.seed = options.seed;

        fs::create_directories(options.out_dir);
        json echo{{"model", options.model},   {"n", options.n},
                  {"p", options.p},           {"reps", options.reps},
                  {"knots", options.knots},   {"degree", options.degree},
                  {"penalty_order", options.penalty_order},
                  {"tau_grid", config.grid.taus},
                  {"lambda_grid", config.grid.lambdas},
                  {"methods", options.methods},
                  {"threads", options.threads}};
        write_manifest(options.out_dir, "bench", echo.dump(), options.seed, {});

        const std::vector<MonteCarloRow> rows =
            monte_carlo(model, options.n, estimators, config);

        std::ofstream out(fs::path(options.out_dir) / "results.csv");
        if (!out) throw DataError("cannot open results.csv in " + options.out_dir);
        out << "method,p,n,reps,mean_mise,sd_mise,failures\n";
        for (const MonteCarloRow& row : rows) {
            out << row.method << ',' << row.p << ',' << row.n << ',' << row.reps << ','
                << format_double(row.mean_mise) << ',' << format_double(row.sd_mise)
                << ',' << row.failures << '\n';
        }
        return kExitOk;
    });
}

}  // namespace evir::cli
