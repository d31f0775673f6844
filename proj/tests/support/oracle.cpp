#include "oracle.hpp"

#include <cmath>

namespace oracle {

namespace {

// Shannon rate in extended precision.
double shannon(double bandwidth_hz, double sinr) {
    return static_cast<double>(static_cast<long double>(bandwidth_hz) * std::log1p(static_cast<long double>(sinr)) /
                               std::log(2.0L));
}

struct Tx {
    int platoon;
    bool is_v2i;
    int node;
    int subband;
    double watts;
};

double watts_of(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

double sigma2(const v2x::ScenarioConfig& c) {
    return watts_of(c.noise_psd_dbm_hz + 10.0 * std::log10(c.subband_bandwidth_hz) + c.noise_figure_db);
}

std::vector<int> members_of(const v2x::ScenarioState& s, int m) {
    std::vector<int> out;
    for (int v = 0; v < s.platoon_size(); ++v)
        if (v != s.leader_index[m]) out.push_back(m * s.platoon_size() + v);
    return out;
}

}  // namespace

Budget budgets(const v2x::ScenarioState& scenario, const v2x::ChannelState& ch, const v2x::Allocation& allocation,
               const v2x::EpisodeState& episode, const v2x::ScenarioConfig& config) {
    const int M = config.num_platoons;
    const int members = config.platoon_size - 1;
    const int N = config.num_subbands;
    const double noise = sigma2(config);

    std::vector<Tx> txs;
    for (int m = 0; m < M; ++m) {
        const int leader = m * config.platoon_size + scenario.leader_index[m];
        const bool v2i_on = episode.v2i_remaining(m) > 0.0;
        bool v2v_on = false;
        for (int j = 0; j < members; ++j) v2v_on = v2v_on || episode.v2v_remaining(m, j) > 0.0;
        txs.push_back({m, true, leader, allocation[m].v2i_rsu % N, v2i_on ? watts_of(allocation[m].v2i_power_dbm) : 0.0});
        txs.push_back({m, false, leader, allocation[m].v2v_subband, v2v_on ? watts_of(allocation[m].v2v_power_dbm) : 0.0});
    }

    Budget b;
    b.v2i_interference = b.v2i_sinr = b.v2i_rate = Eigen::VectorXd::Zero(M);
    b.v2v_interference = b.v2v_sinr = b.v2v_rate = Eigen::MatrixXd::Zero(M, members);

    for (int m = 0; m < M; ++m) {
        const Tx& own_v2i = txs[2 * m];
        const Tx& own_v2v = txs[2 * m + 1];
        const int k = allocation[m].v2i_rsu;

        for (int n = 0; n < N; ++n) {
            if (own_v2i.watts > 0.0 && own_v2i.subband == n) {
                double interference = 0.0;
                for (std::size_t t = 0; t < txs.size(); ++t) {
                    if (&txs[t] == &own_v2i || txs[t].subband != n || txs[t].watts == 0.0) continue;
                    interference += txs[t].watts * ch.large.v2i(txs[t].node, k) * ch.fast.v2i[n](txs[t].node, k);
                }
                const double signal = own_v2i.watts * ch.large.v2i(own_v2i.node, k) * ch.fast.v2i[n](own_v2i.node, k);
                b.v2i_interference(m) = interference;
                b.v2i_sinr(m) = signal / (interference + noise);
                b.v2i_rate(m) = shannon(config.subband_bandwidth_hz, b.v2i_sinr(m));
            }
            if (own_v2v.watts > 0.0 && own_v2v.subband == n) {
                const auto nodes = members_of(scenario, m);
                for (int j = 0; j < members; ++j) {
                    if (episode.v2v_remaining(m, j) <= 0.0) continue;
                    const int rx = nodes[j];
                    double interference = 0.0;
                    for (std::size_t t = 0; t < txs.size(); ++t) {
                        if (&txs[t] == &own_v2v || txs[t].subband != n || txs[t].watts == 0.0) continue;
                        interference += txs[t].watts * ch.large.v2v(txs[t].node, rx) * ch.fast.v2v[n](txs[t].node, rx);
                    }
                    const double signal = own_v2v.watts * ch.large.v2v(own_v2v.node, rx) * ch.fast.v2v[n](own_v2v.node, rx);
                    b.v2v_interference(m, j) = interference;
                    b.v2v_sinr(m, j) = signal / (interference + noise);
                    b.v2v_rate(m, j) = shannon(config.subband_bandwidth_hz / members, b.v2v_sinr(m, j));
                }
            }
        }
    }
    return b;
}

EpisodeScore play_fixed(const v2x::JointDecision& decision, const v2x::ScenarioState& scenario,
                        const v2x::LargeScaleMap& large, const std::vector<v2x::FastFadingMap>& fading,
                        const v2x::ScenarioConfig& config, int b_v2v_bytes) {
    v2x::ScenarioState led = scenario;
    v2x::Allocation allocation(decision.size());
    for (std::size_t m = 0; m < decision.size(); ++m) {
        led.leader_index[m] = decision[m].leader;
        allocation[m].v2v_subband = decision[m].v2v_subband;
        allocation[m].v2v_power_dbm = config.v2v_power_levels_dbm[decision[m].v2v_power_level];
        allocation[m].v2i_rsu = decision[m].v2i_rsu;
        allocation[m].v2i_power_dbm = config.v2i_power_levels_dbm[decision[m].v2i_power_level];
    }
    const int M = config.num_platoons;
    const int members = config.platoon_size - 1;
    v2x::EpisodeState e;
    e.v2i_remaining = Eigen::VectorXd::Constant(M, 8.0 * config.b_v2i_bytes);
    e.v2v_remaining = Eigen::MatrixXd::Constant(M, members, 8.0 * b_v2v_bytes);
    e.total_steps = static_cast<int>(std::lround(config.time_budget_s / config.step_s));

    EpisodeScore score;
    for (int t = 0; t < e.total_steps && t < static_cast<int>(fading.size()); ++t) {
        bool all_done = (e.v2i_remaining.array() <= 0.0).all() && (e.v2v_remaining.array() <= 0.0).all();
        if (all_done) break;
        const Budget b = budgets(led, v2x::ChannelState{large, fading[t]}, allocation, e, config);
        score.rate_sum_mbps += (b.v2i_rate.sum() + b.v2v_rate.sum()) / 1e6;
        for (int m = 0; m < M; ++m) {
            if (e.v2i_remaining(m) > 0.0) e.v2i_remaining(m) -= config.step_s * b.v2i_rate(m);
            for (int j = 0; j < members; ++j)
                if (e.v2v_remaining(m, j) > 0.0) e.v2v_remaining(m, j) -= config.step_s * b.v2v_rate(m, j);
        }
    }
    score.v2i_delivered = static_cast<int>((e.v2i_remaining.array() <= 0.0).count());
    score.v2v_delivered = static_cast<int>((e.v2v_remaining.array() <= 0.0).count());
    score.objective = config.w_c * config.bonus_v2v * score.v2v_delivered + config.w_d * config.bonus_v2i * score.v2i_delivered;
    return score;
}

Exhaustive enumerate_single_platoon(const v2x::ScenarioState& scenario, const v2x::LargeScaleMap& large,
                                    const std::vector<v2x::FastFadingMap>& fading, const v2x::ScenarioConfig& config,
                                    int b_v2v_bytes) {
    Exhaustive ex;
    ex.best_objective = -1.0;
    const int v2v_levels = static_cast<int>(config.v2v_power_levels_dbm.size());
    const int v2i_levels = static_cast<int>(config.v2i_power_levels_dbm.size());
    for (int leader = 0; leader < config.platoon_size; ++leader)
        for (int n = 0; n < config.num_subbands; ++n)
            for (int pv = 0; pv < v2v_levels; ++pv)
                for (int k = 0; k < config.num_rsus; ++k)
                    for (int pi = 0; pi < v2i_levels; ++pi) {
                        const v2x::JointDecision d{{leader, n, pv, k, pi}};
                        const double obj = play_fixed(d, scenario, large, fading, config, b_v2v_bytes).objective;
                        ex.objectives.push_back(obj);
                        ex.best_objective = std::max(ex.best_objective, obj);
                        ++ex.evaluated;
                    }
    return ex;
}

RandomInstance random_instance(v2x::Rng& rng) {
    RandomInstance r;
    r.config.num_platoons = 1 + v2x::uniform_index(rng, 6);
    r.config.num_subbands = 1 + v2x::uniform_index(rng, 3);
    r.scenario = v2x::drop_vehicles(r.config, rng);
    const int M = r.config.num_platoons;
    for (int m = 0; m < M; ++m) r.scenario.leader_index[m] = v2x::uniform_index(rng, r.config.platoon_size);
    r.channels.large = v2x::draw_large_scale(r.scenario, r.config, rng);
    r.channels.fast = v2x::refresh_small_scale(r.config.vehicle_count(), r.config.num_rsus, r.config.num_subbands, rng);
    r.allocation.resize(M);
    for (auto& a : r.allocation) {
        a.v2v_subband = v2x::uniform_index(rng, r.config.num_subbands);
        a.v2v_power_dbm = -100.0 + 123.0 * v2x::uniform01(rng);
        a.v2i_rsu = v2x::uniform_index(rng, r.config.num_rsus);
        a.v2i_power_dbm = -100.0 + 123.0 * v2x::uniform01(rng);
    }
    r.episode = v2x::start_episode(r.config, 2400);
    for (int m = 0; m < M; ++m) {
        if (v2x::uniform01(rng) < 0.25) r.episode.v2i_remaining(m) = -1.0;
        for (int j = 0; j < r.config.members_per_platoon(); ++j)
            if (v2x::uniform01(rng) < 0.25) r.episode.v2v_remaining(m, j) = 0.0;
    }
    return r;
}

}  // namespace oracle
