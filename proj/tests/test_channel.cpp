#include <doctest.h>

#include <cmath>

#include "stats.hpp"
#include "v2x/channel.hpp"

using namespace v2x;

namespace {

ScenarioConfig no_shadowing() {
    ScenarioConfig c;
    c.shadowing_v2v_db = 0.0;
    c.shadowing_v2i_db = 0.0;
    return c;
}

std::vector<double> fading_samples(std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, Stream::channel);
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const FastFadingMap f = refresh_small_scale(10, 10, 1, rng);
        for (Eigen::Index i = 0; i < f.v2i[0].size() && out.size() < n; ++i) out.push_back(f.v2i[0](i));
    }
    return out;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("LOS pathloss") {
    CHECK(pathloss_db(15.0, 6.0) == doctest::Approx(71.4848).epsilon(1e-6));
    CHECK(pathloss_db(30.0, 6.0) - pathloss_db(15.0, 6.0) == doctest::Approx(6.0206).epsilon(1e-4));
}

TEST_CASE("large-scale gain combines pathloss and antenna gains") {
    const ScenarioConfig c = no_shadowing();
    Rng rng(1);
    const Eigen::Vector2d a(100.0, 2.0), b(115.0, 2.0);
    CHECK(linear_to_db(large_scale_gain(a, b, LinkKind::v2v, c, rng)) == doctest::Approx(6.0 - pathloss_db(15.0, 6.0)));
    const Eigen::Vector2d rsu(100.0, 0.0);
    const double d3 = std::sqrt(4.0 + 4.0);
    CHECK(link_distance_3d(a, rsu, LinkKind::v2i, c) == doctest::Approx(d3));
    CHECK(linear_to_db(large_scale_gain(a, rsu, LinkKind::v2i, c, rng)) == doctest::Approx(3.0 - pathloss_db(d3, 6.0)));
    CHECK(large_scale_gain(a, b, LinkKind::v2v, c, rng) == large_scale_gain(a, b, LinkKind::v2v, c, rng));
    CHECK_THROWS_AS(large_scale_gain(a, a, LinkKind::v2v, c, rng), std::invalid_argument);
}

TEST_CASE("vehicle distances wrap around the ring road") {
    const ScenarioConfig c;
    CHECK(link_distance_3d({995.0, 2.0}, {10.0, 2.0}, LinkKind::v2v, c) == doctest::Approx(15.0));
}

TEST_CASE("reciprocity and monotonicity") {
    const ScenarioConfig c = no_shadowing();
    Rng rng(2);
    const Eigen::Vector2d a(10.0, 2.0), b(60.0, -6.0);
    CHECK(large_scale_gain(a, b, LinkKind::v2v, c, rng) == doctest::Approx(large_scale_gain(b, a, LinkKind::v2v, c, rng)));
    double previous = 1.0;
    for (double d = 1.0; d < 500.0; d += 7.0) {
        const double g = large_scale_gain({0.0, 2.0}, {d, 2.0}, LinkKind::v2v, c, rng);
        CHECK(g < previous);
        previous = g;
    }
}

TEST_CASE("large-scale map is symmetric with positive off-diagonal entries") {
    const ScenarioConfig c;
    Rng srng = make_stream(4, Stream::scenario);
    Rng crng = make_stream(4, Stream::channel);
    const ScenarioState s = drop_vehicles(c, srng);
    const LargeScaleMap map = draw_large_scale(s, c, crng);
    CHECK(map.v2v.isApprox(map.v2v.transpose(), 0.0));
    CHECK(map.v2v.diagonal().isZero(0.0));
    CHECK((map.v2i.array() > 0.0).all());
    for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b)
            if (a != b) CHECK(map.v2v(a, b) > 0.0);
}

TEST_CASE("noise power") {
    ScenarioConfig c;
    CHECK(noise_power(c) == doctest::Approx(1.0e-13).epsilon(1e-12));
    c.subband_bandwidth_hz = 2e6;
    CHECK(linear_to_db(noise_power(c) / 1e-13) == doctest::Approx(3.0103).epsilon(1e-4));
    c.subband_bandwidth_hz = 1e6;
    c.noise_figure_db = 0.0;
    CHECK(linear_to_db(noise_power(c)) + 30.0 == doctest::Approx(-109.0));
}

TEST_CASE("fast fading is unit-mean exponential") {
    const auto big = fading_samples(1000000, 1);
    CHECK(std::abs(stats::mean(big) - 1.0) < 0.01);
    for (double g : big) REQUIRE(g >= 0.0);
    const auto ks = fading_samples(100000, 2);
    CHECK(stats::ks_exponential(ks) < stats::ks_critical_1pct(ks.size()));
}

TEST_CASE("fast fading is independent across steps") {
    Rng rng = make_stream(3, Stream::channel);
    std::vector<double> series;
    for (int t = 0; t < 20000; ++t) series.push_back(refresh_small_scale(3, 2, 2, rng).v2v[1](0, 2));
    CHECK(std::abs(stats::lag1_autocorrelation(series)) < 3.0 / std::sqrt(series.size()));
}

TEST_CASE("fast fading is reproducible per seed") {
    Rng a(5), b(5);
    const auto fa = refresh_small_scale(12, 11, 2, a);
    const auto fb = refresh_small_scale(12, 11, 2, b);
    CHECK(fa.v2v[1] == fb.v2v[1]);
    CHECK(fa.v2i[0] == fb.v2i[0]);
}

}
