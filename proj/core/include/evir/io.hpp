#pragma once

#include <string>

#include "evir/baselines.hpp"

namespace evir {

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

struct IngestOptions {
    std::string response;            // response column name
    bool standardize = false;        // z-score each predictor
    bool drop_zero_response = false; // drop rows with y <= 0
};

struct IngestReport {
    Eigen::Index rows_dropped = 0;
    std::vector<double> predictor_means;
    std::vector<double> predictor_sds;
};

/// Reads a comma-separated file with a header row. All non-response columns
/// become predictors, in file order.
Dataset ingest_csv(const std::string& path, const IngestOptions& options,
                   IngestReport* report = nullptr);

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name = "y");

/// Reads every column of a headered CSV as a numeric matrix; if `drop_column`
/// names a header entry, that column is skipped. Used for prediction inputs
/// that may or may not carry a response column.
Matrix ingest_csv_matrix(const std::string& path, const std::string& drop_column = "",
                         std::vector<std::string>* column_names = nullptr);

/// Fit file JSON, schema v1. Round-trips all doubles exactly.
void save_fit(const std::string& path, const SingleIndexFit& fit, Fidelity fidelity);

struct LoadedFit {
    SingleIndexFit fit;
    Fidelity fidelity;
};

LoadedFit load_fit(const std::string& path);

/// FNV-1a 64-bit digest of a file's bytes, as hex.
std::string file_digest(const std::string& path);

/// Writes `manifest.json` into `out_dir`; `config` is any JSON-serializable
/// echo of the command's options (passed as a serialized string to keep the
/// JSON dependency out of this header).
void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_json, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& input_digests);

}  // namespace evir
