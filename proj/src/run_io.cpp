#include "v2x/run_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace v2x {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

std::ifstream open_with_header(const std::string& path, const std::string& header) {
    std::ifstream in(path);
    if (!in) throw OutputError("cannot read '" + path + "'");
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != header) throw OutputError("'" + path + "' does not start with header '" + header + "'");
    return in;
}

}  // namespace

void prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw OutputError("cannot create output directory '" + dir + "'");
    const auto probe = std::filesystem::path(dir) / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw OutputError("output directory '" + dir + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

void write_training_log(const std::string& path, const std::vector<TrainingLogRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw OutputError("cannot write '" + path + "'");
    out << kTrainingLogHeader << '\n';
    for (const auto& r : rows) out << r.episode << ',' << num(r.cumulative_reward) << ',' << num(r.epsilon) << '\n';
}

std::vector<TrainingLogRow> read_training_log(const std::string& path) {
    auto in = open_with_header(path, kTrainingLogHeader);
    std::vector<TrainingLogRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 3) throw OutputError("malformed training log row in '" + path + "'");
        rows.push_back({std::stoi(c[0]), std::stod(c[1]), std::stod(c[2])});
    }
    return rows;
}

void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows, bool append) {
    const bool exists = std::filesystem::exists(path);
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw OutputError("cannot write '" + path + "'");
    if (!append || !exists) out << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        out << r.method << ',' << r.num_platoons << ',' << r.b_v2v_bytes << ',' << num(r.v2v_delivery_prob) << ','
            << num(r.v2i_delivery_prob) << ',' << r.episodes << ',' << r.seed << '\n';
    }
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
    auto in = open_with_header(path, kMetricsHeader);
    std::vector<MetricsRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 7) throw OutputError("malformed metrics row in '" + path + "'");
        rows.push_back({c[0], std::stoi(c[1]), std::stoi(c[2]), std::stod(c[3]), std::stod(c[4]), std::stoi(c[5]),
                        std::stoull(c[6])});
    }
    return rows;
}

void write_manifest(const std::string& dir, const RunConfig& config, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    const auto path = (std::filesystem::path(dir) / "manifest.txt").string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw OutputError("cannot write '" + path + "'");
    out << "config_hash=" << config_hash(config) << '\n';
    out << "seed=" << seed << '\n';
    out << "code_version=" << V2X_VERSION << '\n';
    for (const auto& [k, v] : extra) out << k << '=' << v << '\n';
    std::ofstream cfg(std::filesystem::path(dir) / "config.ini", std::ios::trunc);
    cfg << serialize_config(config);
}

}  // namespace v2x
