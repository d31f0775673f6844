#include "v2x/linklayer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace v2x {

namespace {

struct Transmitters {
    std::vector<int> leader;
    std::vector<int> v2i_subband;
    std::vector<double> v2i_watts;  // zero once delivered
    std::vector<double> v2v_watts;  // zero once every member is served
};

Transmitters active_transmitters(const ScenarioState& scenario, const Allocation& allocation,
                                 const EpisodeState& episode, const ScenarioConfig& config) {
    const int m_count = config.num_platoons;
    Transmitters tx;
    tx.leader.resize(m_count);
    tx.v2i_subband.resize(m_count);
    tx.v2i_watts.resize(m_count);
    tx.v2v_watts.resize(m_count);
    for (int m = 0; m < m_count; ++m) {
        const auto& a = allocation[m];
        tx.leader[m] = scenario.leader_node(m);
        tx.v2i_subband[m] = config.rsu_subband(a.v2i_rsu);
        tx.v2i_watts[m] = episode.v2i_delivered(m) ? 0.0 : dbm_to_watts(a.v2i_power_dbm);
        tx.v2v_watts[m] = episode.v2v_active(m) ? dbm_to_watts(a.v2v_power_dbm) : 0.0;
    }
    return tx;
}

// Interference at vehicle `node` on sub-band n: every V2I signal on n plus V2V signals of
// platoons other than `own`.
double vehicle_interference(const ChannelState& ch, const Transmitters& tx, const Allocation& allocation, int own,
                            int node, int n) {
    double sum = 0.0;
    for (std::size_t a = 0; a < tx.leader.size(); ++a) {
        if (tx.v2i_watts[a] > 0.0 && tx.v2i_subband[a] == n) sum += tx.v2i_watts[a] * ch.v2v_gain(tx.leader[a], node, n);
        if (static_cast<int>(a) != own && tx.v2v_watts[a] > 0.0 && allocation[a].v2v_subband == n)
            sum += tx.v2v_watts[a] * ch.v2v_gain(tx.leader[a], node, n);
    }
    return sum;
}

}  // namespace

EpisodeState start_episode(const ScenarioConfig& config, int b_v2v_bytes) {
    EpisodeState e;
    e.v2i_remaining = Eigen::VectorXd::Constant(config.num_platoons, config.v2i_bits());
    e.v2v_remaining = Eigen::MatrixXd::Constant(config.num_platoons, config.members_per_platoon(), 8.0 * b_v2v_bytes);
    e.v2i_initial_bits = config.v2i_bits();
    e.v2v_initial_bits = 8.0 * b_v2v_bytes;
    e.step = 0;
    e.total_steps = config.steps_per_episode();
    return e;
}

RewardParams RewardParams::from(const ScenarioConfig& config) {
    return RewardParams{config.w_c, config.w_d, config.bonus_v2v, config.bonus_v2i, 1e6};
}

void validate_allocation(const Allocation& allocation, const ScenarioConfig& config) {
    if (static_cast<int>(allocation.size()) != config.num_platoons)
        throw std::invalid_argument("allocation has " + std::to_string(allocation.size()) + " entries, expected " +
                                    std::to_string(config.num_platoons));
    for (std::size_t m = 0; m < allocation.size(); ++m) {
        const auto& a = allocation[m];
        if (a.v2v_subband < 0 || a.v2v_subband >= config.num_subbands)
            throw std::invalid_argument("platoon " + std::to_string(m) + ": invalid V2V sub-band " +
                                        std::to_string(a.v2v_subband));
        if (a.v2i_rsu < 0 || a.v2i_rsu >= config.num_rsus)
            throw std::invalid_argument("platoon " + std::to_string(m) + ": invalid RSU " + std::to_string(a.v2i_rsu));
    }
}

LinkBudget compute_budgets(const ScenarioState& scenario, const ChannelState& channels, const Allocation& allocation,
                           const EpisodeState& episode, const ScenarioConfig& config) {
    validate_allocation(allocation, config);
    const int m_count = config.num_platoons;
    const int members = config.members_per_platoon();
    const double sigma2 = noise_power(config);
    const Transmitters tx = active_transmitters(scenario, allocation, episode, config);

    LinkBudget budget;
    budget.v2i_interference = Eigen::VectorXd::Zero(m_count);
    budget.v2i_sinr = Eigen::VectorXd::Zero(m_count);
    budget.v2v_interference = Eigen::MatrixXd::Zero(m_count, members);
    budget.v2v_sinr = Eigen::MatrixXd::Zero(m_count, members);

    for (int m = 0; m < m_count; ++m) {
        if (tx.v2i_watts[m] > 0.0) {
            const int k = allocation[m].v2i_rsu;
            const int n = tx.v2i_subband[m];
            double interference = 0.0;
            for (int a = 0; a < m_count; ++a) {
                if (a != m && tx.v2i_watts[a] > 0.0 && tx.v2i_subband[a] == n)
                    interference += tx.v2i_watts[a] * channels.v2i_gain(tx.leader[a], k, n);
                if (tx.v2v_watts[a] > 0.0 && allocation[a].v2v_subband == n)
                    interference += tx.v2v_watts[a] * channels.v2i_gain(tx.leader[a], k, n);
            }
            budget.v2i_interference(m) = interference;
            budget.v2i_sinr(m) = tx.v2i_watts[m] * channels.v2i_gain(tx.leader[m], k, n) / (interference + sigma2);
        }
        if (tx.v2v_watts[m] > 0.0) {
            const int n = allocation[m].v2v_subband;
            const auto nodes = scenario.member_nodes(m);
            for (int j = 0; j < members; ++j) {
                if (episode.v2v_delivered(m, j)) continue;
                const double interference = vehicle_interference(channels, tx, allocation, m, nodes[j], n);
                budget.v2v_interference(m, j) = interference;
                budget.v2v_sinr(m, j) =
                    tx.v2v_watts[m] * channels.v2v_gain(tx.leader[m], nodes[j], n) / (interference + sigma2);
            }
        }
    }
    return budget;
}

LinkRates rates(const LinkBudget& budget, const ScenarioConfig& config) {
    const double w = config.subband_bandwidth_hz;
    const double w_member = w / config.members_per_platoon();
    LinkRates r;
    r.v2i = w * budget.v2i_sinr.array().log1p() / std::log(2.0);
    r.v2v = w_member * budget.v2v_sinr.array().log1p() / std::log(2.0);
    return r;
}

std::vector<Eigen::MatrixXd> member_interference(const ScenarioState& scenario, const ChannelState& channels,
                                                 const Allocation& allocation, const EpisodeState& episode,
                                                 const ScenarioConfig& config) {
    validate_allocation(allocation, config);
    const int m_count = config.num_platoons;
    const int members = config.members_per_platoon();
    const Transmitters tx = active_transmitters(scenario, allocation, episode, config);
    std::vector<Eigen::MatrixXd> out(config.num_subbands, Eigen::MatrixXd::Zero(m_count, members));
    for (int m = 0; m < m_count; ++m) {
        const auto nodes = scenario.member_nodes(m);
        for (int j = 0; j < members; ++j)
            for (int n = 0; n < config.num_subbands; ++n)
                out[n](m, j) = vehicle_interference(channels, tx, allocation, m, nodes[j], n);
    }
    return out;
}

EpisodeState consume_payload(EpisodeState episode, const LinkRates& link_rates, const ScenarioConfig& config) {
    const double dt = config.step_s;
    for (Eigen::Index m = 0; m < episode.v2i_remaining.size(); ++m)
        if (episode.v2i_remaining(m) > 0.0) episode.v2i_remaining(m) -= dt * link_rates.v2i(m);
    for (Eigen::Index m = 0; m < episode.v2v_remaining.rows(); ++m)
        for (Eigen::Index j = 0; j < episode.v2v_remaining.cols(); ++j)
            if (episode.v2v_remaining(m, j) > 0.0) episode.v2v_remaining(m, j) -= dt * link_rates.v2v(m, j);
    ++episode.step;
    return episode;
}

double step_reward(const EpisodeState& after, const LinkRates& link_rates, const RewardParams& params) {
    double v2v = 0.0;
    for (Eigen::Index m = 0; m < after.v2v_remaining.rows(); ++m)
        for (Eigen::Index j = 0; j < after.v2v_remaining.cols(); ++j)
            v2v += after.v2v_remaining(m, j) > 0.0 ? link_rates.v2v(m, j) / params.rate_unit_bps : params.bonus_v2v;
    double v2i = 0.0;
    for (Eigen::Index m = 0; m < after.v2i_remaining.size(); ++m)
        v2i += after.v2i_remaining(m) > 0.0 ? link_rates.v2i(m) / params.rate_unit_bps : params.bonus_v2i;
    return params.w_c * v2v + params.w_d * v2i;
}

double max_step_reward(const ScenarioConfig& config) {
    return config.w_c * config.num_platoons * config.members_per_platoon() * config.bonus_v2v +
           config.w_d * config.num_platoons * config.bonus_v2i;
}

DeliveryOutcome delivery_outcomes(const EpisodeState& episode) {
    if (!episode.finished())
        throw std::logic_error("delivery_outcomes: episode still running at step " + std::to_string(episode.step));
    DeliveryOutcome out;
    out.v2v = episode.v2v_remaining.array() <= 0.0;
    out.v2i = episode.v2i_remaining.array() <= 0.0;
    out.v2v_delivered = static_cast<int>(out.v2v.count());
    out.v2i_delivered = static_cast<int>(out.v2i.count());
    return out;
}

}  // namespace v2x
