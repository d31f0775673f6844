#include "v2x/orchestrator.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "v2x/checkpoint.hpp"

namespace v2x {

namespace {

struct StepOutcome {
    EpisodeState after;
    LinkRates rates;
    double reward = 0.0;
    std::vector<Eigen::MatrixXd> interference;  // what each member saw this step, per sub-band
};

StepOutcome environment_step(const ScenarioState& scenario, const ChannelState& channels,
                             const Allocation& allocation, const EpisodeState& episode,
                             const ScenarioConfig& config) {
    StepOutcome out;
    const LinkBudget budget = compute_budgets(scenario, channels, allocation, episode, config);
    out.rates = rates(budget, config);
    out.interference = member_interference(scenario, channels, allocation, episode, config);
    out.after = consume_payload(episode, out.rates, config);
    out.reward = step_reward(out.after, out.rates, RewardParams::from(config));
    return out;
}

std::string checkpoint_path(const std::string& dir, AgentKind kind, int platoon) {
    return (std::filesystem::path(dir) / (std::string(to_string(kind)) + "_" + std::to_string(platoon) + ".qnet"))
        .string();
}

void check_finite(const DqnAgent& agent, double loss, std::uint64_t seed, int episode) {
    if (std::isfinite(loss) && agent.online.all_finite()) return;
    std::ostringstream msg;
    msg << "non-finite " << (std::isfinite(loss) ? "parameter" : "loss") << " (seed " << seed << ", episode "
        << episode << ", agent " << agent.name() << ")";
    throw TrainingDivergence(msg.str());
}

dqn::EpsilonSchedule schedule_of(const DqnHyperparams& h) {
    return {h.epsilon_start, h.epsilon_end, h.epsilon_decay_episodes};
}

}  // namespace

DqnAgent::DqnAgent(AgentSpec spec_in, dqn::QNetwork<double> net, std::size_t capacity)
    : spec(std::move(spec_in)), online(std::move(net)), target(online), optimizer(online), replay(capacity) {}

std::string DqnAgent::name() const {
    return std::string(to_string(spec.kind)) + "_" + std::to_string(spec.platoon);
}

DqnAgent make_agent(const AgentSpec& spec, const DqnHyperparams& hyper, Rng& init_rng) {
    return DqnAgent(spec, dqn::make_network<double>(spec.layer_sizes(), init_rng),
                    static_cast<std::size_t>(hyper.replay_capacity));
}

std::optional<double> train_step(DqnAgent& agent, const DqnHyperparams& hyper, Rng& replay_rng) {
    const auto indices = agent.replay.sample(static_cast<std::size_t>(hyper.batch(agent.spec.kind)), replay_rng);
    if (!indices) return std::nullopt;
    std::vector<const dqn::Transition*> batch;
    batch.reserve(indices->size());
    for (auto i : *indices) batch.push_back(&agent.replay.at(i));

    const Eigen::VectorXd targets = dqn::td_targets(batch, agent.target, hyper.gamma);
    Eigen::MatrixXd states(agent.online.input_size(), static_cast<Eigen::Index>(batch.size()));
    std::vector<int> actions(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        states.col(b) = batch[b]->state;
        actions[b] = batch[b]->action;
    }
    auto [loss, grad] = dqn::gradients(agent.online, states, actions, targets);
    dqn::rmsprop_step(agent.online, agent.optimizer, grad, hyper.learning_rate(agent.spec.kind), hyper.rmsprop_decay,
                      hyper.rmsprop_eps);
    if (++agent.updates % hyper.target_update_interval == 0) agent.target = agent.online;
    return loss;
}

AgentSet make_agents(const RunConfig& config, std::uint64_t seed, bool pl_selection) {
    Rng init = make_stream(seed, Stream::weight_init);
    AgentSet set;
    set.pl_selection = pl_selection;
    for (int m = 0; m < config.scenario.num_platoons; ++m) {
        if (pl_selection) set.pl.push_back(make_agent(agent_spec(AgentKind::pl_select, m, config.scenario), config.dqn, init));
        set.v2v.push_back(make_agent(agent_spec(AgentKind::v2v, m, config.scenario), config.dqn, init));
        set.v2i.push_back(make_agent(agent_spec(AgentKind::v2i, m, config.scenario), config.dqn, init));
    }
    return set;
}

void save_agents(const AgentSet& agents, const std::string& dir, const ScenarioConfig& config) {
    std::filesystem::create_directories(dir);
    auto save_all = [&](const std::vector<DqnAgent>& group) {
        for (const auto& a : group)
            save_checkpoint(checkpoint_path(dir, a.spec.kind, a.spec.platoon), a.online, action_layout(a.spec.kind, config));
    };
    save_all(agents.pl);
    save_all(agents.v2v);
    save_all(agents.v2i);
}

AgentSet load_agents(const std::string& dir, const RunConfig& config, bool pl_selection) {
    if (!std::filesystem::is_directory(dir)) throw CheckpointError("missing checkpoint directory '" + dir + "'");
    AgentSet set;
    set.pl_selection = pl_selection;
    auto load = [&](AgentKind kind, int m) {
        const AgentSpec spec = agent_spec(kind, m, config.scenario);
        auto net = load_checkpoint(checkpoint_path(dir, kind, m), spec.layer_sizes(), action_layout(kind, config.scenario));
        return DqnAgent(spec, std::move(net), static_cast<std::size_t>(config.dqn.replay_capacity));
    };
    for (int m = 0; m < config.scenario.num_platoons; ++m) {
        if (pl_selection) set.pl.push_back(load(AgentKind::pl_select, m));
        set.v2v.push_back(load(AgentKind::v2v, m));
        set.v2i.push_back(load(AgentKind::v2i, m));
    }
    // Extra platoons on disk are a dimension mismatch.
    const int m = config.scenario.num_platoons;
    if (std::filesystem::exists(checkpoint_path(dir, AgentKind::v2v, m)))
        throw CheckpointError("checkpoint directory '" + dir + "' holds more than M=" + std::to_string(m) + " platoons");
    return set;
}

Highway::Highway(const ScenarioConfig& config, Rng scenario_rng, Rng channel_rng)
    : config_(&config), channel_rng_(std::move(channel_rng)), scenario_(drop_vehicles(config, scenario_rng)) {}

void Highway::update_large_scale() {
    if (updates_ > 0) scenario_ = advance_mobility(std::move(scenario_), *config_, config_->pl_update_interval_s);
    large_ = draw_large_scale(scenario_, *config_, channel_rng_);
    ++updates_;
}

FastFadingMap Highway::draw_fast_fading() {
    return refresh_small_scale(config_->vehicle_count(), config_->num_rsus, config_->num_subbands, channel_rng_);
}

TrainingResult run_training(const RunConfig& config, std::uint64_t seed, bool pl_selection, std::optional<int> episodes) {
    config.validate();
    const ScenarioConfig& sc = config.scenario;
    const DqnHyperparams& hyper = config.dqn;
    const int total_episodes = episodes.value_or(config.train_episodes);
    const int steps = sc.steps_per_episode();
    const int block = sc.episodes_per_pl_update();
    const int m_count = sc.num_platoons;
    const int b_v2v = sc.b_v2v_bytes.value_or(sc.train_b_v2v_bytes);
    const auto schedule = schedule_of(hyper);

    TrainingResult result;
    result.agents = make_agents(config, seed, pl_selection);
    AgentSet& agents = result.agents;
    Highway highway(sc, make_stream(seed, Stream::scenario), make_stream(seed, Stream::channel));
    Rng explore = make_stream(seed, Stream::exploration);
    Rng replay_rng = make_stream(seed, Stream::replay);

    // A leader decision enters the replay memory once the return of its block is known.
    struct PendingLeader {
        Eigen::VectorXd state;
        int action = 0;
    };
    std::vector<std::optional<PendingLeader>> pending_leader(m_count);
    double block_reward = 0.0;
    int block_episodes = 0;

    auto flush_leader_transitions = [&](bool terminal) {
        const double normalizer = std::max(1, block_episodes * steps);
        for (int m = 0; m < m_count && pl_selection; ++m) {
            if (!pending_leader[m]) continue;
            agents.pl[m].replay.push({std::move(pending_leader[m]->state), pending_leader[m]->action,
                                      hyper.reward_scale * block_reward / normalizer,
                                      encode_pl_state(highway.scenario(), highway.large(), m, sc), terminal});
            ++result.counters.pl_transitions;
            pending_leader[m].reset();
        }
    };

    // Step-level transition awaiting its successor observation.
    struct PendingStep {
        Eigen::VectorXd state;
        int action = 0;
        double reward = 0.0;
    };

    for (int episode = 0; episode < total_episodes; ++episode) {
        const double eps = dqn::epsilon_for_episode(episode, schedule);
        const TrainingMeta meta{double(episode) / total_episodes, eps};

        if (episode % block == 0) {
            highway.update_large_scale();
            flush_leader_transitions(false);
            block_reward = 0.0;
            block_episodes = 0;
            for (int m = 0; m < m_count; ++m) {
                int leader = 0;
                if (pl_selection) {
                    Eigen::VectorXd s = encode_pl_state(highway.scenario(), highway.large(), m, sc);
                    leader = decode_pl_action(dqn::act(agents.pl[m].online, s, eps, explore), sc);
                    pending_leader[m] = PendingLeader{std::move(s), leader};
                }
                highway.scenario() = set_leader(std::move(highway.scenario()), m, leader);
            }
            ++result.counters.pl_decisions;
        }

        const ScenarioState& scenario = highway.scenario();
        EpisodeState state = start_episode(sc, b_v2v);
        std::vector<Eigen::MatrixXd> previous_interference;
        std::vector<PendingStep> pend_v2v(m_count), pend_v2i(m_count);
        double cumulative = 0.0;

        for (int t = 0; t < steps; ++t) {
            const ChannelState channels{highway.large(), highway.draw_fast_fading()};
            std::vector<Eigen::VectorXd> obs_v2v(m_count), obs_v2i(m_count);
            for (int m = 0; m < m_count; ++m) {
                obs_v2v[m] = encode_v2v_state(scenario, channels, previous_interference, state, m, sc);
                obs_v2i[m] = encode_v2i_state(scenario, channels, state, meta, m, sc);
                if (t > 0) {
                    agents.v2v[m].replay.push({std::move(pend_v2v[m].state), pend_v2v[m].action, pend_v2v[m].reward,
                                               obs_v2v[m], false});
                    agents.v2i[m].replay.push({std::move(pend_v2i[m].state), pend_v2i[m].action, pend_v2i[m].reward,
                                               obs_v2i[m], false});
                    result.counters.v2v_transitions += 1;
                    result.counters.v2i_transitions += 1;
                }
            }

            // All agents act on the same snapshot; effects are applied together.
            Allocation allocation(m_count);
            std::vector<int> a_v2v(m_count), a_v2i(m_count);
            for (int m = 0; m < m_count; ++m) {
                a_v2v[m] = dqn::act(agents.v2v[m].online, obs_v2v[m], eps, explore);
                a_v2i[m] = dqn::act(agents.v2i[m].online, obs_v2i[m], eps, explore);
                allocation[m] = make_platoon_allocation(a_v2v[m], a_v2i[m], sc);
            }
            StepOutcome out = environment_step(scenario, channels, allocation, state, sc);
            cumulative += out.reward;
            result.max_v2v_rate_mbps = std::max(result.max_v2v_rate_mbps, out.rates.v2v.maxCoeff() / 1e6);
            result.max_v2i_rate_mbps = std::max(result.max_v2i_rate_mbps, out.rates.v2i.maxCoeff() / 1e6);
            state = std::move(out.after);
            previous_interference = std::move(out.interference);
            ++result.counters.env_steps;

            const double reward = hyper.reward_scale * out.reward;
            for (int m = 0; m < m_count; ++m) {
                if (t + 1 < steps) {
                    pend_v2v[m] = {std::move(obs_v2v[m]), a_v2v[m], reward};
                    pend_v2i[m] = {std::move(obs_v2i[m]), a_v2i[m], reward};
                    continue;
                }
                agents.v2v[m].replay.push({std::move(obs_v2v[m]), a_v2v[m], reward,
                                           encode_v2v_state(scenario, channels, previous_interference, state, m, sc),
                                           true});
                agents.v2i[m].replay.push({std::move(obs_v2i[m]), a_v2i[m], reward,
                                           encode_v2i_state(scenario, channels, state, meta, m, sc), true});
                result.counters.v2v_transitions += 1;
                result.counters.v2i_transitions += 1;
            }
        }

        block_reward += cumulative;
        ++block_episodes;
        result.log.push_back({episode, cumulative, eps});

        auto train_group = [&](std::vector<DqnAgent>& group) {
            for (auto& agent : group) {
                for (int u = 0; u < hyper.updates_per_episode; ++u) {
                    if (auto loss = train_step(agent, hyper, replay_rng)) {
                        ++result.counters.gradient_updates;
                        check_finite(agent, *loss, seed, episode);
                    }
                }
            }
        };
        train_group(agents.pl);
        train_group(agents.v2v);
        train_group(agents.v2i);
    }
    flush_leader_transitions(true);
    result.counters.large_scale_updates = highway.large_scale_updates();
    return result;
}

EpisodeResult simulate_episode(const ScenarioState& scenario, const LargeScaleMap& large,
                               const std::vector<FastFadingMap>& fading, const ScenarioConfig& config,
                               int b_v2v_bytes, const StepPolicy& policy) {
    EpisodeResult result;
    EpisodeState state = start_episode(config, b_v2v_bytes);
    std::vector<Eigen::MatrixXd> previous_interference;
    for (int t = 0; t < state.total_steps && t < static_cast<int>(fading.size()); ++t) {
        const ChannelState channels{large, fading[t]};
        const Allocation allocation = policy(t, channels, state, previous_interference);
        StepOutcome out = environment_step(scenario, channels, allocation, state, config);
        result.cumulative_reward += out.reward;
        result.rate_sum_mbps += (out.rates.v2v.sum() + out.rates.v2i.sum()) / 1e6;
        state = std::move(out.after);
        previous_interference = std::move(out.interference);
    }
    result.final_state = std::move(state);
    return result;
}

std::vector<MetricsRow> evaluate(const RunConfig& config, std::uint64_t seed, const EvaluationMethod& method,
                                 const std::vector<int>& payload_grid, int episodes) {
    const ScenarioConfig& sc = config.scenario;
    const int block = sc.episodes_per_pl_update();
    const int steps = sc.steps_per_episode();
    std::vector<MetricsRow> rows;
    for (int payload : payload_grid) {
        // Re-created per payload so every grid point sees the same channel sequence.
        Highway highway(sc, make_stream(seed, Stream::scenario, 1), make_stream(seed, Stream::channel, 1));
        long v2v_ok = 0;
        long v2i_ok = 0;
        for (int episode = 0; episode < episodes; ++episode) {
            if (episode % block == 0) {
                highway.update_large_scale();
                const auto leaders = method.choose_leaders(highway.scenario(), highway.large());
                for (int m = 0; m < sc.num_platoons; ++m)
                    highway.scenario() = set_leader(std::move(highway.scenario()), m, leaders[m]);
            }
            std::vector<FastFadingMap> fading;
            fading.reserve(steps);
            for (int t = 0; t < steps; ++t) fading.push_back(highway.draw_fast_fading());
            const EpisodeResult r = method.play_episode(highway.scenario(), highway.large(), fading, payload);
            const DeliveryOutcome outcome = delivery_outcomes(r.final_state);
            v2v_ok += outcome.v2v_delivered;
            v2i_ok += outcome.v2i_delivered;
        }
        MetricsRow row;
        row.method = method.name;
        row.num_platoons = sc.num_platoons;
        row.b_v2v_bytes = payload;
        row.episodes = episodes;
        row.seed = seed;
        const double v2v_links = double(sc.num_platoons) * sc.members_per_platoon() * episodes;
        const double v2i_links = double(sc.num_platoons) * episodes;
        row.v2v_delivery_prob = episodes > 0 ? v2v_ok / v2v_links : 0.0;
        row.v2i_delivery_prob = episodes > 0 ? v2i_ok / v2i_links : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

EvaluationMethod marl_method(const AgentSet& agents, const RunConfig& config) {
    const ScenarioConfig& sc = config.scenario;
    const int m_count = sc.num_platoons;
    if (static_cast<int>(agents.v2v.size()) != m_count || static_cast<int>(agents.v2i.size()) != m_count ||
        (agents.pl_selection && static_cast<int>(agents.pl.size()) != m_count))
        throw CheckpointError("agent set does not match M=" + std::to_string(m_count));
    EvaluationMethod method;
    method.name = agents.pl_selection ? "marl" : "fixed-pl";
    method.choose_leaders = [&agents, &sc, m_count](const ScenarioState& scenario, const LargeScaleMap& large) {
        std::vector<int> leaders(m_count, 0);
        if (!agents.pl_selection) return leaders;
        for (int m = 0; m < m_count; ++m)
            leaders[m] = dqn::argmax(dqn::forward(agents.pl[m].online, encode_pl_state(scenario, large, m, sc)));
        return leaders;
    };
    // Exploration-related inputs are frozen at their end-of-training values.
    const TrainingMeta meta{1.0, config.dqn.epsilon_end};
    method.play_episode = [&agents, &sc, m_count, meta](const ScenarioState& scenario, const LargeScaleMap& large,
                                                       const std::vector<FastFadingMap>& fading, int payload) {
        StepPolicy policy = [&](int, const ChannelState& channels, const EpisodeState& state,
                                const std::vector<Eigen::MatrixXd>& previous) {
            Allocation allocation(m_count);
            for (int m = 0; m < m_count; ++m) {
                const int v2v = dqn::argmax(
                    dqn::forward(agents.v2v[m].online, encode_v2v_state(scenario, channels, previous, state, m, sc)));
                const int v2i = dqn::argmax(
                    dqn::forward(agents.v2i[m].online, encode_v2i_state(scenario, channels, state, meta, m, sc)));
                allocation[m] = make_platoon_allocation(v2v, v2i, sc);
            }
            return allocation;
        };
        return simulate_episode(scenario, large, fading, sc, payload, policy);
    };
    return method;
}

std::vector<MetricsRow> run_testing(const RunConfig& config, const AgentSet& agents, std::uint64_t seed,
                                    std::optional<int> episodes) {
    config.validate();
    return evaluate(config, seed, marl_method(agents, config), config.scenario.test_payload_grid(),
                    episodes.value_or(config.test_episodes));
}

}  // namespace v2x
