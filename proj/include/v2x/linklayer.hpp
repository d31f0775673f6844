#pragma once

#include <Eigen/Dense>
#include <vector>

#include "v2x/channel.hpp"
#include "v2x/config.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

/// One platoon's transmit decisions for a step. The leader sends a single V2V signal to all
/// members on one sub-band, and one V2I signal to one RSU on that RSU's preassigned sub-band.
struct PlatoonAllocation {
    int v2v_subband = 0;
    double v2v_power_dbm = 23.0;
    int v2i_rsu = 0;
    double v2i_power_dbm = 23.0;

    bool operator==(const PlatoonAllocation&) const = default;
};

using Allocation = std::vector<PlatoonAllocation>;

/// Remaining payload bookkeeping for one episode. Members are indexed by rank among the
/// non-leader vehicles of their platoon (see ScenarioState::member_nodes).
struct EpisodeState {
    Eigen::VectorXd v2i_remaining;  // bits, per platoon
    Eigen::MatrixXd v2v_remaining;  // bits, platoon x member
    double v2i_initial_bits = 0.0;
    double v2v_initial_bits = 0.0;
    int step = 0;
    int total_steps = 0;

    bool v2i_delivered(int m) const { return v2i_remaining(m) <= 0.0; }
    bool v2v_delivered(int m, int j) const { return v2v_remaining(m, j) <= 0.0; }
    /// The leader keeps its V2V transmitter on while any member still waits for data.
    bool v2v_active(int m) const { return (v2v_remaining.row(m).array() > 0.0).any(); }
    bool all_delivered() const {
        return (v2i_remaining.array() <= 0.0).all() && (v2v_remaining.array() <= 0.0).all();
    }
    bool finished() const { return step >= total_steps || all_delivered(); }
};

EpisodeState start_episode(const ScenarioConfig& config, int b_v2v_bytes);

struct LinkBudget {
    Eigen::VectorXd v2i_interference;  // W at the chosen RSU
    Eigen::VectorXd v2i_sinr;          // linear
    Eigen::MatrixXd v2v_interference;  // W at each member
    Eigen::MatrixXd v2v_sinr;
};

/// Achievable rates in bits/s; zero for links that are no longer transmitting.
struct LinkRates {
    Eigen::VectorXd v2i;
    Eigen::MatrixXd v2v;
};

struct RewardParams {
    double w_c = 0.3;
    double w_d = 0.7;
    double bonus_v2v = 25.0;
    double bonus_v2i = 15.0;
    double rate_unit_bps = 1e6;

    static RewardParams from(const ScenarioConfig& config);
};

struct DeliveryOutcome {
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> v2v;  // platoon x member
    Eigen::Array<bool, Eigen::Dynamic, 1> v2i;
    int v2v_delivered = 0;
    int v2i_delivered = 0;

    double v2v_fraction() const { return v2v.size() ? double(v2v_delivered) / double(v2v.size()) : 0.0; }
    double v2i_fraction() const { return v2i.size() ? double(v2i_delivered) / double(v2i.size()) : 0.0; }
};

/// Throws std::invalid_argument when a platoon references a sub-band or RSU that does not exist.
void validate_allocation(const Allocation& allocation, const ScenarioConfig& config);

/// Interference and SINR of every active V2I and V2V link for one step.
LinkBudget compute_budgets(const ScenarioState& scenario, const ChannelState& channels, const Allocation& allocation,
                           const EpisodeState& episode, const ScenarioConfig& config);

LinkRates rates(const LinkBudget& budget, const ScenarioConfig& config);

/// Interference power (W) each member would see on each sub-band under `allocation`;
/// element [n](m, j). Excludes the member's own V2V signal.
std::vector<Eigen::MatrixXd> member_interference(const ScenarioState& scenario, const ChannelState& channels,
                                                 const Allocation& allocation, const EpisodeState& episode,
                                                 const ScenarioConfig& config);

/// Drains Δ_T·R bits from each undelivered link and advances the step counter.
EpisodeState consume_payload(EpisodeState episode, const LinkRates& link_rates, const ScenarioConfig& config);

/// Common reward for a step. `after` is the payload state once this step's bits are drained:
/// links delivered by then earn the bonus, the rest earn their rate in rate_unit.
double step_reward(const EpisodeState& after, const LinkRates& link_rates, const RewardParams& params);

/// Largest reward a single step can pay.
double max_step_reward(const ScenarioConfig& config);

/// Throws std::logic_error while the episode is still running.
DeliveryOutcome delivery_outcomes(const EpisodeState& episode);

}  // namespace v2x
