#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "v2x/channel.hpp"
#include "v2x/config.hpp"
#include "v2x/linklayer.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

/// Network shape and action layout of one learning agent.
struct AgentSpec {
    AgentKind kind = AgentKind::v2v;
    int platoon = 0;
    int input_dim = 0;
    int action_dim = 0;
    std::vector<int> hidden;

    std::vector<int> layer_sizes() const;
};

/// Hidden layer widths per agent kind.
std::vector<int> hidden_sizes(AgentKind kind);

AgentSpec agent_spec(AgentKind kind, int platoon, const ScenarioConfig& config);

/// Describes the index -> action mapping; stored in checkpoints so a reload cannot silently remap actions.
std::string action_layout(AgentKind kind, const ScenarioConfig& config);

/// Dimensionless inputs: dB gains scaled by 1/60 and clamped to [-10, 10].
double gain_feature(double linear_gain);
/// 10*log10(1 + I/noise)/60, so zero interference maps to zero.
double interference_feature(double interference_w, double noise_w);

/// Large-scale gains inside the platoon (unordered pairs), then every vehicle to every RSU.
Eigen::VectorXd encode_pl_state(const ScenarioState& scenario, const LargeScaleMap& large, int platoon,
                                const ScenarioConfig& config);

/// Leader-to-member gains per sub-band, last step's interference per member and sub-band,
/// remaining V2V payload fraction and remaining time fraction. `previous_interference` may be
/// empty on the first step, giving zero interference entries.
Eigen::VectorXd encode_v2v_state(const ScenarioState& scenario, const ChannelState& channels,
                                 const std::vector<Eigen::MatrixXd>& previous_interference,
                                 const EpisodeState& episode, int platoon, const ScenarioConfig& config);

struct TrainingMeta {
    double episode_fraction = 1.0;  // training episode index / total training episodes
    double epsilon = 0.02;
};

/// Leader-to-RSU gains on each RSU's own sub-band, remaining V2I payload and time fractions,
/// training progress and exploration rate.
Eigen::VectorXd encode_v2i_state(const ScenarioState& scenario, const ChannelState& channels,
                                 const EpisodeState& episode, const TrainingMeta& meta, int platoon,
                                 const ScenarioConfig& config);

struct V2vAction {
    int subband = 0;
    int power_level = 0;
};

struct V2iAction {
    int rsu = 0;
    int power_level = 0;
};

/// sub-band = index / levels, power level = index % levels.
V2vAction decode_v2v_action(int index, const ScenarioConfig& config);
int encode_v2v_action(const V2vAction& action, const ScenarioConfig& config);
/// RSU = index / levels, power level = index % levels.
V2iAction decode_v2i_action(int index, const ScenarioConfig& config);
int encode_v2i_action(const V2iAction& action, const ScenarioConfig& config);
int decode_pl_action(int index, const ScenarioConfig& config);

/// Applies a V2V and a V2I action to one platoon's allocation entry.
PlatoonAllocation make_platoon_allocation(int v2v_index, int v2i_index, const ScenarioConfig& config);

}  // namespace v2x
