#include "v2x/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace v2x {

namespace {

constexpr int kMaxPlacementAttempts = 1000;

double wrap(double x, double length) {
    double r = std::fmod(x, length);
    if (r < 0) r += length;
    if (r >= length) r = 0.0;
    return r;
}

double lane_offset(int lane, const ScenarioConfig& config) {
    const int per_dir = config.lanes_per_direction;
    if (lane < per_dir) return (lane + 0.5) * config.lane_width_m;
    return -((lane - per_dir) + 0.5) * config.lane_width_m;
}

double vehicle_pitch(const ScenarioConfig& config) {
    return config.vehicle_length_m + config.intra_platoon_gap_m;
}

}  // namespace

std::vector<int> ScenarioState::member_nodes(int platoon) const {
    std::vector<int> out;
    out.reserve(platoon_size() - 1);
    for (int v = 0; v < platoon_size(); ++v)
        if (v != leader_index[platoon]) out.push_back(vehicle_node(platoon, v));
    return out;
}

double wrapped_dx(double a, double b, double length) {
    double d = std::abs(a - b);
    d = std::fmod(d, length);
    return std::min(d, length - d);
}

ScenarioState drop_vehicles(const ScenarioConfig& config, Rng& rng) {
    config.validate();
    const int m_count = config.num_platoons;
    const int o_count = config.platoon_size;
    const double length = config.highway_length_m;
    const double pitch = vehicle_pitch(config);
    const double span = (o_count - 1) * pitch + config.vehicle_length_m;

    ScenarioState state;
    state.rsu_positions.resize(2, config.num_rsus);
    for (int k = 0; k < config.num_rsus; ++k) state.rsu_positions.col(k) << k * config.rsu_spacing_m, 0.0;

    state.vehicle_positions.resize(2, m_count * o_count);
    state.platoon_lane.assign(m_count, 0);
    state.direction.assign(m_count, 1);
    state.leader_index.assign(m_count, 0);

    std::vector<double> centers(m_count, 0.0);
    for (int m = 0; m < m_count; ++m) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            const int lane = uniform_index(rng, 2 * config.lanes_per_direction);
            const int dir = lane < config.lanes_per_direction ? 1 : -1;
            const double front = uniform01(rng) * length;
            const double center = wrap(front - dir * 0.5 * (o_count - 1) * pitch, length);
            placed = true;
            for (int other = 0; other < m; ++other) {
                if (state.platoon_lane[other] == lane && wrapped_dx(center, centers[other], length) < span) {
                    placed = false;
                    break;
                }
            }
            if (!placed) continue;
            state.platoon_lane[m] = lane;
            state.direction[m] = dir;
            centers[m] = center;
            for (int v = 0; v < o_count; ++v) {
                state.vehicle_positions.col(m * o_count + v) << wrap(front - dir * v * pitch, length),
                    lane_offset(lane, config);
            }
        }
        if (!placed)
            throw ConfigError("cannot place platoon " + std::to_string(m) + " without overlap; lanes are overcrowded");
    }
    return state;
}

ScenarioState advance_mobility(ScenarioState state, const ScenarioConfig& config, double dt_s) {
    const double shift = config.velocity_mps() * dt_s;
    const int o_count = state.platoon_size();
    for (int node = 0; node < state.vehicle_positions.cols(); ++node) {
        const int dir = state.direction[node / o_count];
        state.vehicle_positions(0, node) =
            wrap(state.vehicle_positions(0, node) + dir * shift, config.highway_length_m);
    }
    return state;
}

ScenarioState set_leader(ScenarioState state, int platoon, int leader_index) {
    if (platoon < 0 || platoon >= state.num_platoons())
        throw std::invalid_argument("platoon id out of range: " + std::to_string(platoon));
    if (leader_index < 0 || leader_index >= state.platoon_size())
        throw std::invalid_argument("leader index out of range: " + std::to_string(leader_index));
    state.leader_index[platoon] = leader_index;
    return state;
}

double max_leader_member_distance(const ScenarioState& state, const ScenarioConfig& config, int platoon) {
    const Eigen::Vector2d leader = state.vehicle_positions.col(state.leader_node(platoon));
    double worst = 0.0;
    for (int node : state.member_nodes(platoon)) {
        const Eigen::Vector2d p = state.vehicle_positions.col(node);
        const double dx = wrapped_dx(leader.x(), p.x(), config.highway_length_m);
        worst = std::max(worst, std::hypot(dx, leader.y() - p.y()));
    }
    return worst;
}

}  // namespace v2x
