#pragma once

#include <cstdint>
#include <vector>

#include "v2x/orchestrator.hpp"

namespace v2x {

/// Greedy: every V2I agent picks the RSU with the strongest direct gain on that RSU's sub-band,
/// every V2V agent the sub-band with the largest summed leader-to-member gain, both at maximum
/// power. Ties go to the lowest index.
Allocation greedy_actions(const ScenarioState& scenario, const ChannelState& channels, const ScenarioConfig& config);

/// Leader pinned to the front vehicle, greedy allocation each step.
EvaluationMethod greedy_method(const RunConfig& config);

/// One platoon's coordinates in the hill-climbing search space.
struct PlatoonDecision {
    int leader = 0;
    int v2v_subband = 0;
    int v2v_power_level = 0;
    int v2i_rsu = 0;
    int v2i_power_level = 0;

    bool operator==(const PlatoonDecision&) const = default;
};

using JointDecision = std::vector<PlatoonDecision>;

/// Delivered-payload objective with summed rates as tie-breaker; compared lexicographically.
struct HillScore {
    double objective = 0.0;
    double rate_sum_mbps = 0.0;

    bool operator<(const HillScore& o) const {
        return objective < o.objective || (objective == o.objective && rate_sum_mbps < o.rate_sum_mbps);
    }
};

/// Plays the episode with the decision held fixed over all steps.
HillScore score_decision(const JointDecision& decision, const ScenarioState& scenario, const LargeScaleMap& large,
                         const std::vector<FastFadingMap>& fading, const ScenarioConfig& config, int b_v2v_bytes);

/// Number of values each coordinate of a platoon decision can take: leader, sub-band, V2V level, RSU, V2I level.
std::vector<int> decision_radices(const ScenarioConfig& config);
int get_coordinate(const PlatoonDecision& d, int coord);
void set_coordinate(PlatoonDecision& d, int coord, int value);

/// All decisions that differ from `decision` in exactly one coordinate.
std::vector<JointDecision> neighbors(const JointDecision& decision, const ScenarioConfig& config);

struct HillClimbResult {
    JointDecision decision;
    HillScore score;
    std::vector<double> objective_trace;  // objective of the incumbent, starting with the random initial point
    int iterations = 0;
    long evaluations = 0;
};

/// Centralized steepest-ascent hill climbing from a uniformly random start, against the frozen
/// channel realizations of one episode.
HillClimbResult hill_climb(const ScenarioState& scenario, const LargeScaleMap& large,
                           const std::vector<FastFadingMap>& fading, const ScenarioConfig& config, int b_v2v_bytes,
                           Rng& rng, int max_iters = 200);

/// Hill climbing re-run for every evaluation episode.
EvaluationMethod hill_climb_method(const RunConfig& config, std::uint64_t seed);

/// Trains and tests the learning stack with leaders pinned to the front vehicle.
struct FixedPlRun {
    TrainingResult training;
    std::vector<MetricsRow> metrics;
};
FixedPlRun fixed_pl_policy(const RunConfig& config, std::uint64_t seed);

}  // namespace v2x
