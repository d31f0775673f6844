#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace v2x {

/// Raised for any invalid configuration: unknown key, bad value, or a violated invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Static highway, radio and reward parameters. Units are in the field names.
struct ScenarioConfig {
    double highway_length_m = 1000.0;
    int lanes_per_direction = 3;
    double lane_width_m = 4.0;
    int num_rsus = 11;                  // K
    double rsu_spacing_m = 100.0;
    int num_platoons = 4;               // M
    int platoon_size = 3;               // O
    double vehicle_length_m = 13.0;
    double intra_platoon_gap_m = 2.0;
    double velocity_kmh = 140.0;

    int num_subbands = 2;               // N
    double subband_bandwidth_hz = 1e6;  // W
    double carrier_ghz = 6.0;

    double time_budget_s = 5e-3;        // T
    double step_s = 1e-3;               // coherence time
    double pl_update_interval_s = 100e-3;

    int b_v2i_bytes = 624;
    int train_b_v2v_bytes = 2400;
    /// When set, both training and testing use this single V2V payload.
    std::optional<int> b_v2v_bytes;
    int sweep_b_v2v_min_bytes = 1200;
    int sweep_b_v2v_max_bytes = 2800;
    int sweep_b_v2v_step_bytes = 200;

    std::vector<double> v2v_power_levels_dbm{23.0, 15.0, 5.0, -100.0};
    std::vector<double> v2i_power_levels_dbm{23.0, -100.0};

    double antenna_gain_dbi = 3.0;
    double rsu_antenna_gain_dbi = 0.0;
    double vehicle_antenna_height_m = 3.0;
    double rsu_antenna_height_m = 5.0;
    double noise_figure_db = 9.0;
    double noise_psd_dbm_hz = -169.0;
    double shadowing_v2v_db = 3.0;
    double shadowing_v2i_db = 4.0;

    double w_c = 0.3;
    double w_d = 0.7;
    double bonus_v2v = 25.0;            // U, Mbps units
    double bonus_v2i = 15.0;            // V, Mbps units

    double velocity_mps() const { return velocity_kmh / 3.6; }
    int steps_per_episode() const;
    int episodes_per_pl_update() const;
    int vehicle_count() const { return num_platoons * platoon_size; }
    int members_per_platoon() const { return platoon_size - 1; }
    /// Sub-band an RSU is preassigned to.
    int rsu_subband(int rsu) const { return rsu % num_subbands; }
    double v2i_bits() const { return 8.0 * b_v2i_bytes; }
    std::vector<int> test_payload_grid() const;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

enum class AgentKind { pl_select, v2v, v2i };

const char* to_string(AgentKind kind);

struct DqnHyperparams {
    double gamma = 0.9;
    double lr_pl = 1e-4;
    double lr_v2v = 1e-4;
    double lr_v2i = 1e-3;
    double rmsprop_decay = 0.9;
    double rmsprop_eps = 1e-8;
    int batch_size = 64;
    int batch_size_pl = 16;
    int replay_capacity = 100000;
    int target_update_interval = 100;
    /// Mini-batch updates each agent performs after every training episode.
    int updates_per_episode = 1;
    double epsilon_start = 1.0;
    double epsilon_end = 0.02;
    int epsilon_decay_episodes = 1600;
    /// Multiplies the common reward before it enters the replay memory.
    double reward_scale = 0.01;

    double learning_rate(AgentKind kind) const;
    int batch(AgentKind kind) const;
    void validate() const;
};

struct RunConfig {
    ScenarioConfig scenario;
    DqnHyperparams dqn;
    int train_episodes = 2000;
    int test_episodes = 100;
    int hill_max_iters = 200;

    void validate() const;
};

/// Parses INI-style `key = value` text. Absent keys keep their defaults.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Emits every key with its effective value; parse_config_text inverts it exactly.
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64 of the serialized config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace v2x
