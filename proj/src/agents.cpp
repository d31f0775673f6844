#include "v2x/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace v2x {

namespace {

constexpr double kDbScale = 60.0;

double remaining_fraction(double remaining, double initial) {
    if (initial <= 0.0) return 0.0;
    return std::clamp(remaining / initial, 0.0, 1.0);
}

double time_fraction(const EpisodeState& episode) {
    if (episode.total_steps <= 0) return 0.0;
    return double(episode.total_steps - episode.step) / double(episode.total_steps);
}

void check_index(int index, int size, const char* what) {
    if (index < 0 || index >= size)
        throw std::invalid_argument(std::string(what) + " action index " + std::to_string(index) +
                                    " outside 0.." + std::to_string(size - 1));
}

}  // namespace

std::vector<int> AgentSpec::layer_sizes() const {
    std::vector<int> sizes{input_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(action_dim);
    return sizes;
}

std::vector<int> hidden_sizes(AgentKind kind) {
    switch (kind) {
        case AgentKind::pl_select: return {71, 35, 17};
        case AgentKind::v2v: return {100, 50, 24};
        case AgentKind::v2i: return {166, 83, 40};
    }
    return {};
}

AgentSpec agent_spec(AgentKind kind, int platoon, const ScenarioConfig& config) {
    AgentSpec spec;
    spec.kind = kind;
    spec.platoon = platoon;
    spec.hidden = hidden_sizes(kind);
    const int o = config.platoon_size;
    const int k = config.num_rsus;
    const int n = config.num_subbands;
    switch (kind) {
        case AgentKind::pl_select:
            spec.input_dim = o * (o - 1) / 2 + o * k;
            spec.action_dim = o;
            break;
        case AgentKind::v2v:
            spec.input_dim = 2 * (o - 1) * n + 2;
            spec.action_dim = n * static_cast<int>(config.v2v_power_levels_dbm.size());
            break;
        case AgentKind::v2i:
            spec.input_dim = k + 4;
            spec.action_dim = k * static_cast<int>(config.v2i_power_levels_dbm.size());
            break;
    }
    return spec;
}

std::string action_layout(AgentKind kind, const ScenarioConfig& config) {
    auto levels = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", v[i]);
            s += (i ? "," : "") + std::string(buf);
        }
        return s;
    };
    switch (kind) {
        case AgentKind::pl_select: return "pl:leader=index;O=" + std::to_string(config.platoon_size);
        case AgentKind::v2v:
            return "v2v:subband=index/P,power=index%P;N=" + std::to_string(config.num_subbands) + ";P=[" +
                   levels(config.v2v_power_levels_dbm) + "]";
        case AgentKind::v2i:
            return "v2i:rsu=index/P,power=index%P;K=" + std::to_string(config.num_rsus) + ";P=[" +
                   levels(config.v2i_power_levels_dbm) + "]";
    }
    return {};
}

double gain_feature(double linear_gain) {
    const double db = 10.0 * std::log10(std::max(linear_gain, 1e-300));
    return std::clamp(db / kDbScale, -10.0, 10.0);
}

double interference_feature(double interference_w, double noise_w) {
    return std::clamp(10.0 * std::log10(1.0 + interference_w / noise_w) / kDbScale, 0.0, 10.0);
}

Eigen::VectorXd encode_pl_state(const ScenarioState& scenario, const LargeScaleMap& large, int platoon,
                                const ScenarioConfig& config) {
    const int o = config.platoon_size;
    const int k = config.num_rsus;
    Eigen::VectorXd s(o * (o - 1) / 2 + o * k);
    int i = 0;
    for (int a = 0; a < o; ++a)
        for (int b = a + 1; b < o; ++b)
            s(i++) = gain_feature(large.v2v(scenario.vehicle_node(platoon, a), scenario.vehicle_node(platoon, b)));
    for (int v = 0; v < o; ++v)
        for (int r = 0; r < k; ++r) s(i++) = gain_feature(large.v2i(scenario.vehicle_node(platoon, v), r));
    return s;
}

Eigen::VectorXd encode_v2v_state(const ScenarioState& scenario, const ChannelState& channels,
                                 const std::vector<Eigen::MatrixXd>& previous_interference,
                                 const EpisodeState& episode, int platoon, const ScenarioConfig& config) {
    const int members = config.members_per_platoon();
    const int n_count = config.num_subbands;
    const double sigma2 = noise_power(config);
    const auto nodes = scenario.member_nodes(platoon);
    const int leader = scenario.leader_node(platoon);
    Eigen::VectorXd s(2 * members * n_count + 2);
    int i = 0;
    for (int j = 0; j < members; ++j)
        for (int n = 0; n < n_count; ++n) s(i++) = gain_feature(channels.v2v_gain(leader, nodes[j], n));
    for (int j = 0; j < members; ++j)
        for (int n = 0; n < n_count; ++n)
            s(i++) = previous_interference.empty()
                         ? 0.0
                         : interference_feature(previous_interference[n](platoon, j), sigma2);
    double remaining = 0.0;
    for (int j = 0; j < members; ++j) remaining += std::max(0.0, episode.v2v_remaining(platoon, j));
    s(i++) = remaining_fraction(remaining, members * episode.v2v_initial_bits);
    s(i++) = time_fraction(episode);
    return s;
}

Eigen::VectorXd encode_v2i_state(const ScenarioState& scenario, const ChannelState& channels,
                                 const EpisodeState& episode, const TrainingMeta& meta, int platoon,
                                 const ScenarioConfig& config) {
    const int k = config.num_rsus;
    const int leader = scenario.leader_node(platoon);
    Eigen::VectorXd s(k + 4);
    for (int r = 0; r < k; ++r) s(r) = gain_feature(channels.v2i_gain(leader, r, config.rsu_subband(r)));
    s(k) = remaining_fraction(std::max(0.0, episode.v2i_remaining(platoon)), episode.v2i_initial_bits);
    s(k + 1) = time_fraction(episode);
    s(k + 2) = std::clamp(meta.episode_fraction, 0.0, 1.0);
    s(k + 3) = meta.epsilon;
    return s;
}

V2vAction decode_v2v_action(int index, const ScenarioConfig& config) {
    const int levels = static_cast<int>(config.v2v_power_levels_dbm.size());
    check_index(index, config.num_subbands * levels, "v2v");
    return {index / levels, index % levels};
}

int encode_v2v_action(const V2vAction& action, const ScenarioConfig& config) {
    return action.subband * static_cast<int>(config.v2v_power_levels_dbm.size()) + action.power_level;
}

V2iAction decode_v2i_action(int index, const ScenarioConfig& config) {
    const int levels = static_cast<int>(config.v2i_power_levels_dbm.size());
    check_index(index, config.num_rsus * levels, "v2i");
    return {index / levels, index % levels};
}

int encode_v2i_action(const V2iAction& action, const ScenarioConfig& config) {
    return action.rsu * static_cast<int>(config.v2i_power_levels_dbm.size()) + action.power_level;
}

int decode_pl_action(int index, const ScenarioConfig& config) {
    check_index(index, config.platoon_size, "pl");
    return index;
}

PlatoonAllocation make_platoon_allocation(int v2v_index, int v2i_index, const ScenarioConfig& config) {
    const auto v2v = decode_v2v_action(v2v_index, config);
    const auto v2i = decode_v2i_action(v2i_index, config);
    return {v2v.subband, config.v2v_power_levels_dbm[v2v.power_level], v2i.rsu,
            config.v2i_power_levels_dbm[v2i.power_level]};
}

}  // namespace v2x
