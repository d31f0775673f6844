#include "v2x/baselines.hpp"

#include <algorithm>
#include <iterator>
#include <memory>

namespace v2x {

namespace {

constexpr int kCoordinates = 5;

int max_power_level(const std::vector<double>& levels) {
    return static_cast<int>(std::distance(levels.begin(), std::max_element(levels.begin(), levels.end())));
}

}  // namespace

Allocation greedy_actions(const ScenarioState& scenario, const ChannelState& channels, const ScenarioConfig& config) {
    const double v2v_max = config.v2v_power_levels_dbm[max_power_level(config.v2v_power_levels_dbm)];
    const double v2i_max = config.v2i_power_levels_dbm[max_power_level(config.v2i_power_levels_dbm)];
    Allocation allocation(config.num_platoons);
    for (int m = 0; m < config.num_platoons; ++m) {
        const int leader = scenario.leader_node(m);
        const auto members = scenario.member_nodes(m);
        int best_band = 0;
        double best_band_gain = -1.0;
        for (int n = 0; n < config.num_subbands; ++n) {
            double g = 0.0;
            for (int node : members) g += channels.v2v_gain(leader, node, n);
            if (g > best_band_gain) {
                best_band_gain = g;
                best_band = n;
            }
        }
        int best_rsu = 0;
        double best_rsu_gain = -1.0;
        for (int k = 0; k < config.num_rsus; ++k) {
            const double g = channels.v2i_gain(leader, k, config.rsu_subband(k));
            if (g > best_rsu_gain) {
                best_rsu_gain = g;
                best_rsu = k;
            }
        }
        allocation[m] = {best_band, v2v_max, best_rsu, v2i_max};
    }
    return allocation;
}

EvaluationMethod greedy_method(const RunConfig& config) {
    const ScenarioConfig& sc = config.scenario;
    EvaluationMethod method;
    method.name = "greedy";
    method.choose_leaders = [&sc](const ScenarioState&, const LargeScaleMap&) {
        return std::vector<int>(sc.num_platoons, 0);
    };
    method.play_episode = [&sc](const ScenarioState& scenario, const LargeScaleMap& large,
                                const std::vector<FastFadingMap>& fading, int payload) {
        return simulate_episode(scenario, large, fading, sc, payload,
                                [&](int, const ChannelState& channels, const EpisodeState&,
                                    const std::vector<Eigen::MatrixXd>&) {
                                    return greedy_actions(scenario, channels, sc);
                                });
    };
    return method;
}

std::vector<int> decision_radices(const ScenarioConfig& config) {
    return {config.platoon_size, config.num_subbands, static_cast<int>(config.v2v_power_levels_dbm.size()),
            config.num_rsus, static_cast<int>(config.v2i_power_levels_dbm.size())};
}

int get_coordinate(const PlatoonDecision& d, int coord) {
    switch (coord) {
        case 0: return d.leader;
        case 1: return d.v2v_subband;
        case 2: return d.v2v_power_level;
        case 3: return d.v2i_rsu;
        default: return d.v2i_power_level;
    }
}

void set_coordinate(PlatoonDecision& d, int coord, int value) {
    switch (coord) {
        case 0: d.leader = value; break;
        case 1: d.v2v_subband = value; break;
        case 2: d.v2v_power_level = value; break;
        case 3: d.v2i_rsu = value; break;
        default: d.v2i_power_level = value; break;
    }
}

HillScore score_decision(const JointDecision& decision, const ScenarioState& scenario, const LargeScaleMap& large,
                         const std::vector<FastFadingMap>& fading, const ScenarioConfig& config, int b_v2v_bytes) {
    ScenarioState led = scenario;
    Allocation allocation(decision.size());
    for (std::size_t m = 0; m < decision.size(); ++m) {
        const auto& d = decision[m];
        led.leader_index[m] = d.leader;
        allocation[m] = {d.v2v_subband, config.v2v_power_levels_dbm[d.v2v_power_level], d.v2i_rsu,
                         config.v2i_power_levels_dbm[d.v2i_power_level]};
    }
    const EpisodeResult r = simulate_episode(
        led, large, fading, config, b_v2v_bytes,
        [&](int, const ChannelState&, const EpisodeState&, const std::vector<Eigen::MatrixXd>&) { return allocation; });
    const DeliveryOutcome outcome = delivery_outcomes(r.final_state);
    return {config.w_c * config.bonus_v2v * outcome.v2v_delivered + config.w_d * config.bonus_v2i * outcome.v2i_delivered,
            r.rate_sum_mbps};
}

std::vector<JointDecision> neighbors(const JointDecision& decision, const ScenarioConfig& config) {
    const auto radices = decision_radices(config);
    std::vector<JointDecision> out;
    for (std::size_t m = 0; m < decision.size(); ++m) {
        for (int c = 0; c < kCoordinates; ++c) {
            for (int v = 0; v < radices[c]; ++v) {
                if (v == get_coordinate(decision[m], c)) continue;
                JointDecision next = decision;
                set_coordinate(next[m], c, v);
                out.push_back(std::move(next));
            }
        }
    }
    return out;
}

HillClimbResult hill_climb(const ScenarioState& scenario, const LargeScaleMap& large,
                           const std::vector<FastFadingMap>& fading, const ScenarioConfig& config, int b_v2v_bytes,
                           Rng& rng, int max_iters) {
    const auto radices = decision_radices(config);
    HillClimbResult result;
    result.decision.resize(scenario.num_platoons());
    for (auto& d : result.decision)
        for (int c = 0; c < kCoordinates; ++c) set_coordinate(d, c, uniform_index(rng, radices[c]));
    result.score = score_decision(result.decision, scenario, large, fading, config, b_v2v_bytes);
    ++result.evaluations;
    result.objective_trace.push_back(result.score.objective);

    for (int iter = 0; iter < max_iters; ++iter) {
        const JointDecision* best = nullptr;
        HillScore best_score = result.score;
        const auto candidates = neighbors(result.decision, config);
        for (const auto& candidate : candidates) {
            const HillScore s = score_decision(candidate, scenario, large, fading, config, b_v2v_bytes);
            ++result.evaluations;
            if (best_score < s) {
                best_score = s;
                best = &candidate;
            }
        }
        if (!best) break;
        result.decision = *best;
        result.score = best_score;
        result.objective_trace.push_back(best_score.objective);
        ++result.iterations;
    }
    return result;
}

EvaluationMethod hill_climb_method(const RunConfig& config, std::uint64_t seed) {
    const ScenarioConfig& sc = config.scenario;
    const int max_iters = config.hill_max_iters;
    auto rng = std::make_shared<Rng>(make_stream(seed, Stream::baseline));
    EvaluationMethod method;
    method.name = "hill";
    // Leaders come from the per-episode search.
    method.choose_leaders = [&sc](const ScenarioState&, const LargeScaleMap&) {
        return std::vector<int>(sc.num_platoons, 0);
    };
    method.play_episode = [&sc, rng, max_iters](const ScenarioState& scenario, const LargeScaleMap& large,
                                                const std::vector<FastFadingMap>& fading, int payload) {
        const HillClimbResult hc = hill_climb(scenario, large, fading, sc, payload, *rng, max_iters);
        ScenarioState led = scenario;
        Allocation allocation(hc.decision.size());
        for (std::size_t m = 0; m < hc.decision.size(); ++m) {
            const auto& d = hc.decision[m];
            led.leader_index[m] = d.leader;
            allocation[m] = {d.v2v_subband, sc.v2v_power_levels_dbm[d.v2v_power_level], d.v2i_rsu,
                             sc.v2i_power_levels_dbm[d.v2i_power_level]};
        }
        return simulate_episode(
            led, large, fading, sc, payload,
            [&](int, const ChannelState&, const EpisodeState&, const std::vector<Eigen::MatrixXd>&) { return allocation; });
    };
    return method;
}

FixedPlRun fixed_pl_policy(const RunConfig& config, std::uint64_t seed) {
    FixedPlRun run;
    run.training = run_training(config, seed, false);
    run.metrics = run_testing(config, run.training.agents, seed);
    return run;
}

}  // namespace v2x
