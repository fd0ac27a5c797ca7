#include "evir/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace evir {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    std::size_t begin = cell.find_first_not_of(" \t\r");
    if (begin == std::string::npos) begin = cell.size();
    std::size_t end = cell.find_last_not_of(" \t\r");
    const std::string trimmed =
        begin <= end ? cell.substr(begin, end - begin + 1) : std::string();
    double value = 0.0;
    const auto result =
        std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
    if (result.ec != std::errc{} || result.ptr != trimmed.data() + trimmed.size() ||
        !std::isfinite(value)) {
        throw DataError("NonNumericCell at row " + std::to_string(row) + ", column " +
                        std::to_string(col));
    }
    return value;
}

}  // namespace

Dataset ingest_csv(const std::string& path, const IngestOptions& options,
                   IngestReport* report) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("ingest_csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);

    std::ptrdiff_t response_col = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == options.response) response_col = static_cast<std::ptrdiff_t>(j);
    }
    if (response_col < 0) {
        throw DataError("MissingColumn: response '" + options.response + "' not in header");
    }
    const std::size_t n_cols = header.size();
    const std::size_t p = n_cols - 1;
    if (p < 1) throw DataError("ingest_csv: no predictor columns");

    std::vector<double> ys;
    std::vector<std::vector<double>> rows;
    std::size_t row_number = 1;
    Eigen::Index dropped = 0;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != n_cols) {
            throw DataError("ingest_csv: row " + std::to_string(row_number) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n_cols));
        }
        double y = 0.0;
        std::vector<double> xr(p);
        std::size_t k = 0;
        for (std::size_t j = 0; j < n_cols; ++j) {
            const double v = parse_cell(cells[j], row_number, j + 1);
            if (static_cast<std::ptrdiff_t>(j) == response_col) {
                y = v;
            } else {
                xr[k++] = v;
            }
        }
        if (y <= 0.0) {
            if (options.drop_zero_response) {
                ++dropped;
                continue;
            }
            throw DataError("ingest_csv: non-positive response at row " +
                            std::to_string(row_number) +
                            " (use drop_zero_response to filter)");
        }
        ys.push_back(y);
        rows.push_back(std::move(xr));
    }
    if (ys.empty()) throw DataError("EmptyAfterFiltering: no usable rows in " + path);

    Dataset data;
    const auto n = static_cast<Eigen::Index>(ys.size());
    data.y.resize(n);
    data.x.resize(n, static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < n; ++i) {
        data.y(i) = ys[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < p; ++j) {
            data.x(i, static_cast<Eigen::Index>(j)) = rows[static_cast<std::size_t>(i)][j];
        }
    }
    for (std::size_t j = 0; j < n_cols; ++j) {
        if (static_cast<std::ptrdiff_t>(j) != response_col) {
            data.column_names.push_back(header[j]);
        }
    }

    if (report) {
        report->rows_dropped = dropped;
        report->predictor_means.assign(p, 0.0);
        report->predictor_sds.assign(p, 1.0);
    }
    if (options.standardize) {
        for (std::size_t j = 0; j < p; ++j) {
            const auto col = data.x.col(static_cast<Eigen::Index>(j));
            const double mean = col.mean();
            const double sd = std::sqrt((col.array() - mean).square().sum() /
                                        std::max<Eigen::Index>(n - 1, 1));
            const double scale = sd > 0.0 ? sd : 1.0;
            data.x.col(static_cast<Eigen::Index>(j)) =
                (col.array() - mean) / scale;
            if (report) {
                report->predictor_means[j] = mean;
                report->predictor_sds[j] = scale;
            }
        }
    }
    return data;
}

Matrix ingest_csv_matrix(const std::string& path, const std::string& drop_column,
                         std::vector<std::string>* column_names) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest_csv_matrix: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("ingest_csv_matrix: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);

    std::ptrdiff_t drop = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!drop_column.empty() && header[j] == drop_column) {
            drop = static_cast<std::ptrdiff_t>(j);
        }
    }
    const std::size_t n_cols = header.size();
    const std::size_t kept = n_cols - (drop >= 0 ? 1 : 0);
    if (kept < 1) throw DataError("ingest_csv_matrix: no columns kept from " + path);

    std::vector<std::vector<double>> rows;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != n_cols) {
            throw DataError("ingest_csv_matrix: row " + std::to_string(row_number) +
                            " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(n_cols));
        }
        std::vector<double> xr;
        xr.reserve(kept);
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (static_cast<std::ptrdiff_t>(j) == drop) continue;
            xr.push_back(parse_cell(cells[j], row_number, j + 1));
        }
        rows.push_back(std::move(xr));
    }
    if (rows.empty()) throw DataError("ingest_csv_matrix: no data rows in " + path);

    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kept));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < kept; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    if (column_names) {
        column_names->clear();
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (static_cast<std::ptrdiff_t>(j) != drop) column_names->push_back(header[j]);
        }
    }
    return out;
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name) {
    std::ofstream out(path);
    if (!out) throw DataError("write_dataset_csv: cannot open " + path);
    out << response_name;
    for (Eigen::Index j = 0; j < data.p(); ++j) {
        out << ',';
        if (static_cast<std::size_t>(j) < data.column_names.size()) {
            out << data.column_names[static_cast<std::size_t>(j)];
        } else {
            out << 'x' << (j + 1);
        }
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        out << format_double(data.y(i));
        for (Eigen::Index j = 0; j < data.p(); ++j) {
            out << ',' << format_double(data.x(i, j));
        }
        out << '\n';
    }
}

namespace {

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const json& j) {
    Vector out(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& v : j) out(i++) = v.get<double>();
    return out;
}

}  // namespace

void save_fit(const std::string& path, const SingleIndexFit& fit, Fidelity fidelity) {
    json doc;
    doc["schema_version"] = 1;
    doc["theta"] = vector_to_json(fit.theta);
    doc["b"] = vector_to_json(fit.b);
    doc["basis"] = {{"degree", fit.basis.degree()},
                    {"interval", {fit.basis.a(), fit.basis.b()}},
                    {"breakpoints", fit.basis.breakpoints()}};
    doc["penalty_order"] = fit.penalty.order;
    doc["lambda"] = fit.lambda;
    doc["tau"] = fit.tau;
    doc["threshold_value"] = fit.threshold_value;
    doc["n_exceed"] = fit.n_exceed;
    doc["n_total"] = fit.n_total;
    doc["final_loss"] = fit.final_loss;
    doc["converged"] = fit.converged;
    doc["used_proximal"] = fit.used_proximal;
    doc["sign_convention"] = "gamma = exp(-alpha), theta_1 > 0";
    doc["fidelity"] = fidelity == Fidelity::Corrected ? "corrected" : "paper";
    json trace = json::array();
    for (const auto& it : fit.trace) {
        trace.push_back({{"theta_step_norm", it.theta_step_norm},
                         {"loss", it.loss},
                         {"proximal", it.proximal}});
    }
    doc["trace"] = std::move(trace);

    std::ofstream out(path);
    if (!out) throw DataError("save_fit: cannot open " + path);
    out << doc.dump(2) << '\n';
}

LoadedFit load_fit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_fit: cannot open " + path);
    json doc = json::parse(in);
    if (doc.value("schema_version", 0) != 1) {
        throw DataError("load_fit: unsupported schema version");
    }

    SplineBasis basis(doc["basis"]["breakpoints"].get<std::vector<double>>(),
                      doc["basis"]["degree"].get<int>());
    const int order = doc["penalty_order"].get<int>();
    PenaltyMatrix penalty = penalty_matrix(basis, order);

    SingleIndexFit fit{vector_from_json(doc["theta"]),
                       vector_from_json(doc["b"]),
                       std::move(basis),
                       std::move(penalty),
                       doc["lambda"].get<double>(),
                       doc["tau"].get<double>(),
                       doc["threshold_value"].get<double>(),
                       doc["n_exceed"].get<Eigen::Index>(),
                       doc["n_total"].get<Eigen::Index>(),
                       {},
                       doc["final_loss"].get<double>(),
                       doc["converged"].get<bool>(),
                       doc["used_proximal"].get<bool>(),
                       {}};
    for (const auto& it : doc["trace"]) {
        fit.trace.push_back({it["theta_step_norm"].get<double>(),
                             it["loss"].get<double>(), it["proximal"].get<bool>()});
    }
    const Fidelity fidelity = doc.value("fidelity", "corrected") == std::string("paper")
                                  ? Fidelity::Paper
                                  : Fidelity::Corrected;
    return LoadedFit{std::move(fit), fidelity};
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("file_digest: cannot open " + path);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(hex);
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_json, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& input_digests) {
    std::filesystem::create_directories(out_dir);
    json doc;
    doc["command"] = command;
    doc["config"] = json::parse(config_json);
    doc["seed"] = seed;
    const auto now = std::chrono::system_clock::now();
    doc["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    doc["artifact_version"] = "0.1.0";
    json inputs = json::object();
    for (const auto& [file, digest] : input_digests) inputs[file] = digest;
    doc["inputs"] = std::move(inputs);

    std::ofstream out(std::filesystem::path(out_dir) / "manifest.json");
    if (!out) throw DataError("write_manifest: cannot open manifest.json in " + out_dir);
    out << doc.dump(2) << '\n';
}

}  // namespace evir
