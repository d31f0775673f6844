#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2x/agents.hpp"
#include "v2x/channel.hpp"
#include "v2x/config.hpp"
#include "v2x/dqn.hpp"
#include "v2x/linklayer.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

/// Raised when a loss or a parameter stops being finite.
class TrainingDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One learner: online and target networks, optimizer moments and its own replay memory.
struct DqnAgent {
    AgentSpec spec;
    dqn::QNetwork<double> online;
    dqn::QNetwork<double> target;
    dqn::RmsPropState<double> optimizer;
    dqn::ReplayMemory replay;
    int updates = 0;

    DqnAgent(AgentSpec spec, dqn::QNetwork<double> net, std::size_t capacity);
    std::string name() const;
};

DqnAgent make_agent(const AgentSpec& spec, const DqnHyperparams& hyper, Rng& init_rng);

/// Samples one mini-batch and applies one RMSProp update; refreshes the target network every
/// `target_update_interval` updates. Returns the batch loss, or nothing when the replay memory
/// holds fewer transitions than the batch size.
std::optional<double> train_step(DqnAgent& agent, const DqnHyperparams& hyper, Rng& replay_rng);

struct AgentSet {
    bool pl_selection = true;
    std::vector<DqnAgent> pl;  // empty when leaders are pinned to the front vehicle
    std::vector<DqnAgent> v2v;
    std::vector<DqnAgent> v2i;
};

AgentSet make_agents(const RunConfig& config, std::uint64_t seed, bool pl_selection);

/// Writes <dir>/{pl,v2v,v2i}_<m>.qnet.
void save_agents(const AgentSet& agents, const std::string& dir, const ScenarioConfig& config);
/// Throws CheckpointError on missing files or mismatched shapes.
AgentSet load_agents(const std::string& dir, const RunConfig& config, bool pl_selection);

/// Ring-road scenario with its two fading timescales. Owns the scenario and channel streams.
class Highway {
public:
    Highway(const ScenarioConfig& config, Rng scenario_rng, Rng channel_rng);

    /// Moves vehicles by one leader-update interval (except on the first call) and redraws large-scale fading.
    void update_large_scale();
    FastFadingMap draw_fast_fading();

    const ScenarioState& scenario() const { return scenario_; }
    ScenarioState& scenario() { return scenario_; }
    const LargeScaleMap& large() const { return large_; }
    int large_scale_updates() const { return updates_; }

private:
    const ScenarioConfig* config_;
    Rng channel_rng_;
    ScenarioState scenario_;
    LargeScaleMap large_;
    int updates_ = 0;
};

struct TrainingLogRow {
    int episode = 0;
    double cumulative_reward = 0.0;
    double epsilon = 0.0;
};

struct TrainingCounters {
    int large_scale_updates = 0;
    int pl_decisions = 0;  // per PL agent
    long env_steps = 0;
    long v2v_transitions = 0;  // summed over agents
    long v2i_transitions = 0;
    long pl_transitions = 0;
    long gradient_updates = 0;
};

struct TrainingResult {
    AgentSet agents;
    std::vector<TrainingLogRow> log;
    TrainingCounters counters;
    double max_v2v_rate_mbps = 0.0;
    double max_v2i_rate_mbps = 0.0;
};

/// Multi-agent training loop. Leader agents act every pl-update interval; V2V and V2I agents act
/// every step against the same snapshot, share the common reward, and each agent performs one
/// mini-batch update per episode. `episodes` overrides config.train_episodes when given.
TrainingResult run_training(const RunConfig& config, std::uint64_t seed, bool pl_selection = true,
                            std::optional<int> episodes = std::nullopt);

/// Result of playing one episode.
struct EpisodeResult {
    EpisodeState final_state;
    double cumulative_reward = 0.0;
    double rate_sum_mbps = 0.0;
};

/// Chooses the allocation for step t given the current channels, payload state and the
/// interference each member saw during the previous step (empty at t = 0).
using StepPolicy = std::function<Allocation(int t, const ChannelState& channels, const EpisodeState& episode,
                                            const std::vector<Eigen::MatrixXd>& previous_interference)>;

/// Plays all steps of an episode on pre-drawn fast fading (one map per step).
EpisodeResult simulate_episode(const ScenarioState& scenario, const LargeScaleMap& large,
                               const std::vector<FastFadingMap>& fading, const ScenarioConfig& config,
                               int b_v2v_bytes, const StepPolicy& policy);

struct MetricsRow {
    std::string method;
    int num_platoons = 0;
    int b_v2v_bytes = 0;
    double v2v_delivery_prob = 0.0;
    double v2i_delivery_prob = 0.0;
    int episodes = 0;
    std::uint64_t seed = 0;
};

/// Per-method hooks used by the shared evaluation driver.
struct EvaluationMethod {
    std::string name;
    /// Leader per platoon, called whenever large-scale fading is redrawn.
    std::function<std::vector<int>(const ScenarioState&, const LargeScaleMap&)> choose_leaders;
    std::function<EpisodeResult(const ScenarioState&, const LargeScaleMap&, const std::vector<FastFadingMap>&,
                                int b_v2v_bytes)>
        play_episode;
};

/// Runs `episodes` evaluation episodes per payload in the grid. Channel randomness depends only on
/// `seed`, so all methods evaluated with one seed see identical channels.
std::vector<MetricsRow> evaluate(const RunConfig& config, std::uint64_t seed, const EvaluationMethod& method,
                                 const std::vector<int>& payload_grid, int episodes);

/// Greedy (epsilon = 0) distributed execution of trained agents. No replay pushes or updates occur.
EvaluationMethod marl_method(const AgentSet& agents, const RunConfig& config);

/// Test phase over the configured payload grid.
std::vector<MetricsRow> run_testing(const RunConfig& config, const AgentSet& agents, std::uint64_t seed,
                                    std::optional<int> episodes = std::nullopt);

}  // namespace v2x
