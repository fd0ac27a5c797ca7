#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evir::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitConvergence = 3;

/// Parses "start:end:step" into an inclusive arithmetic grid (tau grids).
std::vector<double> parse_linear_grid(const std::string& text);

/// Parses "lo:hi:count" into a log-spaced grid (lambda grids).
std::vector<double> parse_log_grid(const std::string& text);

struct FitOptions {
    std::string data;
    std::string response = "y";
    bool standardize = false;
    bool drop_zero_response = false;
    int knots = 40;  // basis dimension K
    int degree = 3;
    int penalty_order = 2;
    double tau = 0.9;
    double lambda = 1.0;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string fidelity = "corrected";
};

struct TuneOptions {
    std::string data;
    std::string response = "y";
    bool standardize = false;
    bool drop_zero_response = false;
    int knots = 40;
    int degree = 3;
    int penalty_order = 2;
    std::string tau_grid;     // "0.90:0.99:0.01"; empty -> defaults
    std::string lambda_grid;  // "1e-6:1e2:9"; empty -> defaults
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    std::string fidelity = "corrected";
};

struct PredictOptions {
    std::string fit;   // FitFile path
    std::string data;  // covariate CSV; `response` column dropped if present
    std::string response = "y";
    std::optional<double> tau_e;  // extrapolation level for Weissman quantiles
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

struct SimulateOptions {
    std::string model = "i";  // i..v
    int n = 1000;
    int p = 3;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

struct BenchOptions {
    std::string model = "i";
    int n = 1000;
    int p = 3;
    int reps = 50;
    int knots = 13;
    int degree = 3;
    int penalty_order = 2;
    std::string tau_grid;
    std::string lambda_grid;
    std::vector<std::string> methods = {"sim-d", "sim-m", "linear"};
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
};

int cmd_fit(const FitOptions& options, std::ostream& err);
int cmd_tune(const TuneOptions& options, std::ostream& err);
int cmd_predict(const PredictOptions& options, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& err);
int cmd_bench(const BenchOptions& options, std::ostream& err);

}  // namespace evir::cli
