#pragma once

#include <Eigen/Dense>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/rng.hpp"

namespace v2x {

/// Positions of every node on the highway. Vehicle v of platoon m is node m*O + v;
/// vehicle 0 is the front of its platoon.
struct ScenarioState {
    Eigen::Matrix2Xd rsu_positions;      // 2 x K
    Eigen::Matrix2Xd vehicle_positions;  // 2 x (M*O), x along the road, y lateral
    std::vector<int> platoon_lane;       // 0 .. 2*lanes-1
    std::vector<int> direction;          // +1 or -1
    std::vector<int> leader_index;       // 0 .. O-1

    int num_platoons() const { return static_cast<int>(leader_index.size()); }
    int platoon_size() const {
        return leader_index.empty() ? 0 : static_cast<int>(vehicle_positions.cols()) / num_platoons();
    }
    int vehicle_node(int platoon, int index) const { return platoon * platoon_size() + index; }
    int leader_node(int platoon) const { return vehicle_node(platoon, leader_index[platoon]); }
    /// Non-leader vehicle nodes of a platoon, front to back.
    std::vector<int> member_nodes(int platoon) const;
};

/// Minimum-image separation along a ring road of the given length.
double wrapped_dx(double a, double b, double length);

/// Places M platoons of O trucks and K RSUs. Throws ConfigError if a lane cannot fit its platoons.
ScenarioState drop_vehicles(const ScenarioConfig& config, Rng& rng);

/// Moves every vehicle by direction * v * dt, wrapping around the ring road.
ScenarioState advance_mobility(ScenarioState state, const ScenarioConfig& config, double dt_s);

ScenarioState set_leader(ScenarioState state, int platoon, int leader_index);

/// Largest center-to-center distance from the leader to any member of the platoon.
double max_leader_member_distance(const ScenarioState& state, const ScenarioConfig& config, int platoon);

}  // namespace v2x
