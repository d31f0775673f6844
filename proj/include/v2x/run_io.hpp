#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/orchestrator.hpp"

namespace v2x {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kTrainingLogHeader = "episode,cumulative_reward,epsilon";
inline constexpr const char* kMetricsHeader = "method,M,B_v2v_bytes,v2v_delivery_prob,v2i_delivery_prob,episodes,seed";

void write_training_log(const std::string& path, const std::vector<TrainingLogRow>& rows);
std::vector<TrainingLogRow> read_training_log(const std::string& path);

/// Writes the header and rows, or appends rows when `append` is set and the file already exists.
void write_metrics(const std::string& path, const std::vector<MetricsRow>& rows, bool append = false);
std::vector<MetricsRow> read_metrics(const std::string& path);

/// Flat key=value run description: config hash, seed, code version, plus caller extras.
void write_manifest(const std::string& dir, const RunConfig& config, std::uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Creates the directory and checks that files can be written there.
void prepare_output_dir(const std::string& dir);

}  // namespace v2x
