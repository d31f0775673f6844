#include "v2x/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace v2x {

namespace {

bool is_integer_multiple(double value, double unit) {
    const double ratio = value / unit;
    return std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ConfigError("not a number: '" + text + "'");
    return value;
}

int parse_int(const std::string& text) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError("not an integer: '" + text + "'");
    return value;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
    return out;
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

struct Key {
    std::string name;
    std::string unit;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename Field>
Key scenario_key(std::string name, std::string unit, Field ScenarioConfig::*field) {
    Key key{std::move(name), std::move(unit), {}, {}};
    key.set = [field](RunConfig& c, const std::string& v) {
        if constexpr (std::is_same_v<Field, int>) c.scenario.*field = parse_int(v);
        else if constexpr (std::is_same_v<Field, double>) c.scenario.*field = parse_double(v);
        else if constexpr (std::is_same_v<Field, std::optional<int>>) c.scenario.*field = parse_int(v);
        else c.scenario.*field = parse_list(v);
    };
    key.get = [field](const RunConfig& c) -> std::string {
        if constexpr (std::is_same_v<Field, int>) return std::to_string(c.scenario.*field);
        else if constexpr (std::is_same_v<Field, double>) return format_double(c.scenario.*field);
        else if constexpr (std::is_same_v<Field, std::optional<int>>)
            return (c.scenario.*field) ? std::to_string(*(c.scenario.*field)) : std::string();
        else return format_list(c.scenario.*field);
    };
    return key;
}

template <typename Field>
Key dqn_key(std::string name, Field DqnHyperparams::*field) {
    Key key{std::move(name), "", {}, {}};
    key.set = [field](RunConfig& c, const std::string& v) {
        if constexpr (std::is_same_v<Field, int>) c.dqn.*field = parse_int(v);
        else c.dqn.*field = parse_double(v);
    };
    key.get = [field](const RunConfig& c) -> std::string {
        if constexpr (std::is_same_v<Field, int>) return std::to_string(c.dqn.*field);
        else return format_double(c.dqn.*field);
    };
    return key;
}

Key run_key(std::string name, int RunConfig::*field) {
    Key key{std::move(name), "count", {}, {}};
    key.set = [field](RunConfig& c, const std::string& v) { c.*field = parse_int(v); };
    key.get = [field](const RunConfig& c) { return std::to_string(c.*field); };
    return key;
}

const std::vector<Key>& keys() {
    using S = ScenarioConfig;
    using D = DqnHyperparams;
    static const std::vector<Key> table = {
        scenario_key("highway_length_m", "m", &S::highway_length_m),
        scenario_key("lanes_per_direction", "count", &S::lanes_per_direction),
        scenario_key("lane_width_m", "m", &S::lane_width_m),
        scenario_key("K", "count", &S::num_rsus),
        scenario_key("rsu_spacing_m", "m", &S::rsu_spacing_m),
        scenario_key("M", "count", &S::num_platoons),
        scenario_key("O", "count", &S::platoon_size),
        scenario_key("vehicle_length_m", "m", &S::vehicle_length_m),
        scenario_key("intra_platoon_gap_m", "m", &S::intra_platoon_gap_m),
        scenario_key("velocity_kmh", "km/h", &S::velocity_kmh),
        scenario_key("N", "count", &S::num_subbands),
        scenario_key("W_hz", "Hz", &S::subband_bandwidth_hz),
        scenario_key("carrier_ghz", "GHz", &S::carrier_ghz),
        scenario_key("T_s", "s", &S::time_budget_s),
        scenario_key("delta_T_s", "s", &S::step_s),
        scenario_key("pl_update_interval_s", "s", &S::pl_update_interval_s),
        scenario_key("B_v2i_bytes", "bytes", &S::b_v2i_bytes),
        scenario_key("train_B_v2v_bytes", "bytes", &S::train_b_v2v_bytes),
        scenario_key("B_v2v_bytes", "bytes", &S::b_v2v_bytes),
        scenario_key("sweep_B_v2v_min_bytes", "bytes", &S::sweep_b_v2v_min_bytes),
        scenario_key("sweep_B_v2v_max_bytes", "bytes", &S::sweep_b_v2v_max_bytes),
        scenario_key("sweep_B_v2v_step_bytes", "bytes", &S::sweep_b_v2v_step_bytes),
        scenario_key("v2v_power_levels_dbm", "dBm", &S::v2v_power_levels_dbm),
        scenario_key("v2i_power_levels_dbm", "dBm", &S::v2i_power_levels_dbm),
        scenario_key("antenna_gain_dbi", "dBi", &S::antenna_gain_dbi),
        scenario_key("rsu_antenna_gain_dbi", "dBi", &S::rsu_antenna_gain_dbi),
        scenario_key("vehicle_antenna_height_m", "m", &S::vehicle_antenna_height_m),
        scenario_key("rsu_antenna_height_m", "m", &S::rsu_antenna_height_m),
        scenario_key("noise_figure_db", "dB", &S::noise_figure_db),
        scenario_key("noise_psd_dbm_hz", "dBm/Hz", &S::noise_psd_dbm_hz),
        scenario_key("shadowing_v2v_db", "dB", &S::shadowing_v2v_db),
        scenario_key("shadowing_v2i_db", "dB", &S::shadowing_v2i_db),
        scenario_key("w_c", "", &S::w_c),
        scenario_key("w_d", "", &S::w_d),
        scenario_key("U", "Mbps", &S::bonus_v2v),
        scenario_key("V", "Mbps", &S::bonus_v2i),
        dqn_key("gamma", &D::gamma),
        dqn_key("lr_pl", &D::lr_pl),
        dqn_key("lr_v2v", &D::lr_v2v),
        dqn_key("lr_v2i", &D::lr_v2i),
        dqn_key("rmsprop_decay", &D::rmsprop_decay),
        dqn_key("rmsprop_eps", &D::rmsprop_eps),
        dqn_key("batch_size", &D::batch_size),
        dqn_key("batch_size_pl", &D::batch_size_pl),
        dqn_key("replay_capacity", &D::replay_capacity),
        dqn_key("target_update_interval", &D::target_update_interval),
        dqn_key("updates_per_episode", &D::updates_per_episode),
        dqn_key("epsilon_start", &D::epsilon_start),
        dqn_key("epsilon_end", &D::epsilon_end),
        dqn_key("epsilon_decay_episodes", &D::epsilon_decay_episodes),
        dqn_key("reward_scale", &D::reward_scale),
        run_key("train_episodes", &RunConfig::train_episodes),
        run_key("test_episodes", &RunConfig::test_episodes),
        run_key("hill_max_iters", &RunConfig::hill_max_iters),
    };
    return table;
}

}  // namespace

int ScenarioConfig::steps_per_episode() const {
    return static_cast<int>(std::lround(time_budget_s / step_s));
}

int ScenarioConfig::episodes_per_pl_update() const {
    return static_cast<int>(std::lround(pl_update_interval_s / time_budget_s));
}

std::vector<int> ScenarioConfig::test_payload_grid() const {
    if (b_v2v_bytes) return {*b_v2v_bytes};
    std::vector<int> grid;
    for (int b = sweep_b_v2v_min_bytes; b <= sweep_b_v2v_max_bytes; b += sweep_b_v2v_step_bytes)
        grid.push_back(b);
    return grid;
}

void ScenarioConfig::validate() const {
    if (highway_length_m <= 0) throw ConfigError("highway_length_m must be positive");
    if (lanes_per_direction < 1) throw ConfigError("lanes_per_direction must be >= 1");
    if (lane_width_m <= 0) throw ConfigError("lane_width_m must be positive");
    if (num_rsus < 1) throw ConfigError("K must be >= 1");
    if (rsu_spacing_m <= 0) throw ConfigError("rsu_spacing_m must be positive");
    if (num_rsus * rsu_spacing_m > highway_length_m + rsu_spacing_m + 1e-9)
        throw ConfigError("RSUs do not fit on the highway (K*rsu_spacing_m > highway_length_m + rsu_spacing_m)");
    if (num_platoons < 1) throw ConfigError("M must be >= 1");
    if (platoon_size < 2) throw ConfigError("O must be >= 2");
    if (vehicle_length_m <= 0 || intra_platoon_gap_m < 0) throw ConfigError("invalid vehicle geometry");
    if (velocity_kmh < 0) throw ConfigError("velocity_kmh must be non-negative");
    if (num_subbands < 1) throw ConfigError("N must be >= 1");
    if (!(subband_bandwidth_hz > 0)) throw ConfigError("W_hz must be positive");
    if (carrier_ghz <= 0) throw ConfigError("carrier_ghz must be positive");
    if (step_s <= 0 || time_budget_s <= 0) throw ConfigError("T_s and delta_T_s must be positive");
    if (!is_integer_multiple(time_budget_s, step_s)) throw ConfigError("T_s must be an integer multiple of delta_T_s");
    if (!is_integer_multiple(pl_update_interval_s, time_budget_s))
        throw ConfigError("pl_update_interval_s must be an integer multiple of T_s");
    if (b_v2i_bytes < 0 || train_b_v2v_bytes < 0 || (b_v2v_bytes && *b_v2v_bytes < 0))
        throw ConfigError("payloads must be non-negative");
    if (sweep_b_v2v_step_bytes <= 0 || sweep_b_v2v_min_bytes > sweep_b_v2v_max_bytes)
        throw ConfigError("invalid V2V payload sweep grid");
    if (v2v_power_levels_dbm.empty() || v2i_power_levels_dbm.empty())
        throw ConfigError("power level lists must be non-empty");
    if (vehicle_antenna_height_m < 0 || rsu_antenna_height_m < 0) throw ConfigError("antenna heights must be >= 0");
    if (shadowing_v2v_db < 0 || shadowing_v2i_db < 0) throw ConfigError("shadowing deviations must be >= 0");
    if (w_c < 0 || w_c > 1 || w_d < 0 || w_d > 1) throw ConfigError("w_c and w_d must lie in [0, 1]");
    if (bonus_v2v < 0 || bonus_v2i < 0) throw ConfigError("U and V must be non-negative");
}

const char* to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::pl_select: return "pl";
        case AgentKind::v2v: return "v2v";
        case AgentKind::v2i: return "v2i";
    }
    return "?";
}

double DqnHyperparams::learning_rate(AgentKind kind) const {
    switch (kind) {
        case AgentKind::pl_select: return lr_pl;
        case AgentKind::v2v: return lr_v2v;
        case AgentKind::v2i: return lr_v2i;
    }
    return lr_v2v;
}

int DqnHyperparams::batch(AgentKind kind) const {
    return kind == AgentKind::pl_select ? batch_size_pl : batch_size;
}

void DqnHyperparams::validate() const {
    if (gamma < 0 || gamma > 1) throw ConfigError("gamma must lie in [0, 1]");
    if (lr_pl <= 0 || lr_v2v <= 0 || lr_v2i <= 0) throw ConfigError("learning rates must be positive");
    if (rmsprop_decay < 0 || rmsprop_decay >= 1) throw ConfigError("rmsprop_decay must lie in [0, 1)");
    if (rmsprop_eps <= 0) throw ConfigError("rmsprop_eps must be positive");
    if (batch_size < 1 || batch_size_pl < 1) throw ConfigError("batch sizes must be >= 1");
    if (replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
    if (target_update_interval < 1) throw ConfigError("target_update_interval must be >= 1");
    if (updates_per_episode < 0) throw ConfigError("updates_per_episode must be >= 0");
    if (epsilon_end < 0 || epsilon_start > 1 || epsilon_end > epsilon_start)
        throw ConfigError("epsilon schedule must satisfy 0 <= epsilon_end <= epsilon_start <= 1");
    if (epsilon_decay_episodes < 1) throw ConfigError("epsilon_decay_episodes must be >= 1");
    if (reward_scale <= 0) throw ConfigError("reward_scale must be positive");
}

void RunConfig::validate() const {
    scenario.validate();
    dqn.validate();
    if (train_episodes < 0 || test_episodes < 0) throw ConfigError("episode counts must be non-negative");
    if (hill_max_iters < 0) throw ConfigError("hill_max_iters must be non-negative");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& table = keys();
        auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == name; });
        if (it == table.end()) throw ConfigError("unknown key '" + name + "'", line_no);
        if (value.empty()) {
            if (name == "B_v2v_bytes") {
                config.scenario.b_v2v_bytes.reset();
                continue;
            }
            throw ConfigError("missing value for '" + name + "'", line_no);
        }
        try {
            it->set(config, value);
        } catch (const ConfigError& e) {
            throw ConfigError(name + ": " + e.what(), line_no);
        }
    }
    config.validate();
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const auto& key : keys()) {
        out += key.name + " = " + key.get(config);
        if (!key.unit.empty()) out += "  # " + key.unit;
        out += '\n';
    }
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_config(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace v2x
