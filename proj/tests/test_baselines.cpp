#include <doctest.h>

#include "oracle.hpp"
#include "v2x/baselines.hpp"

using namespace v2x;

namespace {

struct Episode {
    ScenarioConfig config;
    ScenarioState scenario;
    LargeScaleMap large;
    std::vector<FastFadingMap> fading;

    Episode(int platoons, std::uint64_t seed) {
        config.num_platoons = platoons;
        Rng s = make_stream(seed, Stream::scenario);
        Rng c = make_stream(seed, Stream::channel);
        scenario = drop_vehicles(config, s);
        large = draw_large_scale(scenario, config, c);
        for (int t = 0; t < config.steps_per_episode(); ++t)
            fading.push_back(refresh_small_scale(config.vehicle_count(), config.num_rsus, config.num_subbands, c));
    }
};

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("greedy picks the strongest sub-band and RSU at full power") {
    Episode ep(1, 1);
    ChannelState ch{ep.large, ep.fading[0]};
    ch.fast.v2v[0].setConstant(1.0);
    ch.fast.v2v[1].setConstant(2.0);
    ch.fast.v2i[0].setConstant(1.0);
    ch.fast.v2i[1].setConstant(1.0);
    ch.large.v2i.setConstant(1e-9);
    ch.large.v2i(0, 7) = 1e-8;
    const Allocation a = greedy_actions(ep.scenario, ch, ep.config);
    CHECK(a[0].v2v_subband == 1);
    CHECK(a[0].v2v_power_dbm == 23.0);
    CHECK(a[0].v2i_rsu == 7);
    CHECK(a[0].v2i_power_dbm == 23.0);

    ch.fast.v2v[1].setConstant(1.0);
    ch.large.v2i.setConstant(1e-9);
    const Allocation tie = greedy_actions(ep.scenario, ch, ep.config);
    CHECK(tie[0].v2v_subband == 0);
    CHECK(tie[0].v2i_rsu == 0);
}

TEST_CASE("neighbourhood differs in exactly one coordinate") {
    const ScenarioConfig c;
    const JointDecision d{{0, 0, 0, 0, 0}, {2, 1, 3, 10, 1}};
    const auto n = neighbors(d, c);
    CHECK(n.size() == 2 * 17);
    for (const auto& x : n) {
        int changed = 0;
        for (std::size_t m = 0; m < d.size(); ++m)
            for (int k = 0; k < 5; ++k) changed += get_coordinate(x[m], k) != get_coordinate(d[m], k);
        CHECK(changed == 1);
    }
}

TEST_CASE("scores agree with the oracle episode") {
    Episode ep(3, 2);
    Rng rng(3);
    const auto radices = decision_radices(ep.config);
    for (int i = 0; i < 30; ++i) {
        JointDecision d(3);
        for (auto& p : d)
            for (int k = 0; k < 5; ++k) set_coordinate(p, k, uniform_index(rng, radices[k]));
        const HillScore s = score_decision(d, ep.scenario, ep.large, ep.fading, ep.config, 1600);
        const oracle::EpisodeScore o = oracle::play_fixed(d, ep.scenario, ep.large, ep.fading, ep.config, 1600);
        CHECK(s.objective == doctest::Approx(o.objective));
        CHECK(s.rate_sum_mbps == doctest::Approx(o.rate_sum_mbps).epsilon(1e-12));
    }
}

TEST_CASE("hill climbing never lowers its objective") {
    Episode ep(4, 4);
    Rng rng(5);
    const HillClimbResult r = hill_climb(ep.scenario, ep.large, ep.fading, ep.config, 2400, rng);
    REQUIRE(r.objective_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) CHECK(r.objective_trace[i] >= r.objective_trace[i - 1]);
    for (const auto& n : neighbors(r.decision, ep.config))
        CHECK_FALSE(r.score < score_decision(n, ep.scenario, ep.large, ep.fading, ep.config, 2400));
}

TEST_CASE("zero iterations returns the random start") {
    Episode ep(2, 6);
    Rng a(7), b(7);
    const HillClimbResult r = hill_climb(ep.scenario, ep.large, ep.fading, ep.config, 2400, a, 0);
    CHECK(r.iterations == 0);
    CHECK(r.evaluations == 1);
    CHECK(r.objective_trace.size() == 1);
    const auto radices = decision_radices(ep.config);
    JointDecision start(2);
    for (auto& p : start)
        for (int k = 0; k < 5; ++k) set_coordinate(p, k, uniform_index(b, radices[k]));
    CHECK(r.decision == start);
}

TEST_CASE("single-platoon hill climbing ends at a local optimum below the exhaustive optimum") {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        Episode ep(1, seed);
        const oracle::Exhaustive ex = oracle::enumerate_single_platoon(ep.scenario, ep.large, ep.fading, ep.config, 2800);
        CHECK(ex.evaluated == 528);
        Rng rng(seed);
        const HillClimbResult r = hill_climb(ep.scenario, ep.large, ep.fading, ep.config, 2800, rng);
        CHECK(r.score.objective <= ex.best_objective);
        for (const auto& n : neighbors(r.decision, ep.config))
            CHECK(oracle::play_fixed(n, ep.scenario, ep.large, ep.fading, ep.config, 2800).objective <= r.score.objective);
    }
}

TEST_CASE("baseline methods evaluate over the payload grid") {
    RunConfig c;
    c.hill_max_iters = 5;
    const auto greedy = evaluate(c, 1, greedy_method(c), {1200, 2800}, 2);
    const auto hill = evaluate(c, 1, hill_climb_method(c, 1), {1200, 2800}, 2);
    REQUIRE(greedy.size() == 2);
    REQUIRE(hill.size() == 2);
    CHECK(greedy[0].method == "greedy");
    CHECK(hill[1].method == "hill");
    CHECK(hill[1].b_v2v_bytes == 2800);
    CHECK(greedy[0].v2v_delivery_prob >= greedy[1].v2v_delivery_prob);
}

}
