#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "v2x/config.hpp"
#include "v2x/rng.hpp"
#include "v2x/scenario.hpp"

namespace v2x {

enum class LinkKind { v2v, v2i };

/// Linear large-scale power gains (pathloss, shadowing and antenna gains).
struct LargeScaleMap {
    Eigen::MatrixXd v2v;  // vehicles x vehicles, symmetric, zero diagonal
    Eigen::MatrixXd v2i;  // vehicles x RSUs
};

/// Per sub-band linear small-scale power gains for every ordered pair.
struct FastFadingMap {
    std::vector<Eigen::MatrixXd> v2v;  // [n](tx vehicle, rx vehicle)
    std::vector<Eigen::MatrixXd> v2i;  // [n](tx vehicle, rx RSU)
};

/// Large- and small-scale gains in force during one step.
struct ChannelState {
    LargeScaleMap large;
    FastFadingMap fast;

    double v2v_gain(int tx, int rx, int subband) const { return large.v2v(tx, rx) * fast.v2v[subband](tx, rx); }
    double v2i_gain(int tx, int rsu, int subband) const { return large.v2i(tx, rsu) * fast.v2i[subband](tx, rsu); }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Highway LOS pathloss in dB; distance in meters.
double pathloss_db(double distance_3d_m, double carrier_ghz);

/// 3-D antenna separation; vehicle-to-vehicle separation uses the ring-road minimum image.
double link_distance_3d(const Eigen::Vector2d& tx, const Eigen::Vector2d& rx, LinkKind kind,
                        const ScenarioConfig& config);

/// Linear large-scale gain for one link. Shadowing is drawn from `rng` when its deviation is non-zero.
/// Throws std::invalid_argument for coincident endpoints.
double large_scale_gain(const Eigen::Vector2d& tx, const Eigen::Vector2d& rx, LinkKind kind,
                        const ScenarioConfig& config, Rng& rng);

/// Large-scale gains for all vehicle pairs and vehicle-RSU pairs; one shadowing draw per unordered pair.
LargeScaleMap draw_large_scale(const ScenarioState& scenario, const ScenarioConfig& config, Rng& rng);

/// Independent unit-mean exponential power gains (Rayleigh amplitude) for each ordered pair and sub-band.
FastFadingMap refresh_small_scale(int num_vehicles, int num_rsus, int num_subbands, Rng& rng);

/// Receiver noise power in watts over one sub-band.
double noise_power(const ScenarioConfig& config);

}  // namespace v2x
