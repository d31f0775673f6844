#include "v2x/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace v2x {

double pathloss_db(double distance_3d_m, double carrier_ghz) {
    return 32.4 + 20.0 * std::log10(distance_3d_m) + 20.0 * std::log10(carrier_ghz);
}

double link_distance_3d(const Eigen::Vector2d& tx, const Eigen::Vector2d& rx, LinkKind kind,
                        const ScenarioConfig& config) {
    double dx = 0.0;
    double dh = 0.0;
    if (kind == LinkKind::v2v) {
        dx = wrapped_dx(tx.x(), rx.x(), config.highway_length_m);
    } else {
        dx = tx.x() - rx.x();
        dh = config.rsu_antenna_height_m - config.vehicle_antenna_height_m;
    }
    const double dy = tx.y() - rx.y();
    return std::sqrt(dx * dx + dy * dy + dh * dh);
}

double large_scale_gain(const Eigen::Vector2d& tx, const Eigen::Vector2d& rx, LinkKind kind,
                        const ScenarioConfig& config, Rng& rng) {
    const double d = link_distance_3d(tx, rx, kind, config);
    if (!(d > 0.0)) throw std::invalid_argument("large_scale_gain: zero link distance");
    const double sigma = kind == LinkKind::v2v ? config.shadowing_v2v_db : config.shadowing_v2i_db;
    const double shadow = sigma > 0.0 ? sigma * standard_normal(rng) : 0.0;
    const double antennas = kind == LinkKind::v2v ? 2.0 * config.antenna_gain_dbi
                                                  : config.antenna_gain_dbi + config.rsu_antenna_gain_dbi;
    return db_to_linear(antennas - pathloss_db(d, config.carrier_ghz) - shadow);
}

LargeScaleMap draw_large_scale(const ScenarioState& scenario, const ScenarioConfig& config, Rng& rng) {
    const auto n_veh = scenario.vehicle_positions.cols();
    const auto n_rsu = scenario.rsu_positions.cols();
    LargeScaleMap map;
    map.v2v = Eigen::MatrixXd::Zero(n_veh, n_veh);
    map.v2i = Eigen::MatrixXd::Zero(n_veh, n_rsu);
    for (Eigen::Index a = 0; a < n_veh; ++a) {
        for (Eigen::Index b = a + 1; b < n_veh; ++b) {
            const double g = large_scale_gain(scenario.vehicle_positions.col(a), scenario.vehicle_positions.col(b),
                                              LinkKind::v2v, config, rng);
            map.v2v(a, b) = g;
            map.v2v(b, a) = g;
        }
        for (Eigen::Index k = 0; k < n_rsu; ++k) {
            map.v2i(a, k) = large_scale_gain(scenario.vehicle_positions.col(a), scenario.rsu_positions.col(k),
                                             LinkKind::v2i, config, rng);
        }
    }
    return map;
}

FastFadingMap refresh_small_scale(int num_vehicles, int num_rsus, int num_subbands, Rng& rng) {
    // |h|^2 for h ~ CN(0, 1) is exponential with unit mean; sampled by inversion.
    auto draw = [&rng] { return -std::log1p(-uniform01(rng)); };
    FastFadingMap map;
    map.v2v.reserve(num_subbands);
    map.v2i.reserve(num_subbands);
    for (int n = 0; n < num_subbands; ++n) {
        map.v2v.push_back(Eigen::MatrixXd::NullaryExpr(num_vehicles, num_vehicles, draw));
        map.v2i.push_back(Eigen::MatrixXd::NullaryExpr(num_vehicles, num_rsus, draw));
    }
    return map;
}

double noise_power(const ScenarioConfig& config) {
    const double dbm = config.noise_psd_dbm_hz + 10.0 * std::log10(config.subband_bandwidth_hz) + config.noise_figure_db;
    return dbm_to_watts(dbm);
}

}  // namespace v2x
