// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "dominav/acceptance.hpp"
#include "dominav/inference.hpp"
#include "dominav/scenario.hpp"

using namespace dominav;

TEST_CASE("init_posterior samples the box uniformly and validates input") {
    CHECK_THROWS_AS(init_posterior(1, 7, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(init_posterior(100, 7, 0.0), std::invalid_argument);

    const ParticleSet ps = init_posterior(500, 7, 0.1);
    CHECK(ps.hypotheses.size() == 500);
    double w_sum = 0.0;
    for (const auto& h : ps.hypotheses) {
        CHECK(h.params.in_bounds());
        w_sum += h.weight;
    }
    CHECK(w_sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ps.ess() == doctest::Approx(500.0).epsilon(1e-6));
}

TEST_CASE("estimate is the weighted mean with max_neighbors rounded") {
    ParticleSet ps;
    ps.hypotheses.push_back({MotionParams{10, 4, 10, 0.5, 1.2}, 0.5});
    ps.hypotheses.push_back({MotionParams{20, 7, 20, 1.5, 2.2}, 0.5});
    const Estimate e = estimate(ps);
    CHECK(e.params.pref_speed == doctest::Approx(1.7));
    CHECK(e.params.neighbor_dist == doctest::Approx(15.0));
    CHECK(e.params.max_neighbors == doctest::Approx(6.0));  // mean 5.5 rounds up
    CHECK(e.stddev[4] == doctest::Approx(0.5).epsilon(1e-9));

    ps.hypotheses[0].weight = 1.0;
    ps.hypotheses[1].weight = 0.0;
    const Estimate solo = estimate(ps);
    CHECK(solo.params == ps.hypotheses[0].params);
}

TEST_CASE("observation on a hypothesis's prediction raises its relative weight") {
    ParticleSet ps;
    ps.sigma_obs = 0.1;
    ps.rng.seed(1);
    const MotionParams slow = MotionParams::checked(15, 10, 24, 0.8, 1.2);
    const MotionParams fast = MotionParams::checked(15, 10, 24, 0.8, 2.2);
    ps.hypotheses = {{slow, 0.5}, {fast, 0.5}};
    ps.prev_target_pos = Vec2{-0.12, 0.0};  // heading +x at 1.2 m/s

    ObservationFrame f0{0.0, {{0, {0.0, 0.0}}}, 0};
    // Observed displacement matches the slow hypothesis exactly.
    ObservationFrame f1{0.1, {{0, {0.12, 0.0}}}, 0};
    update(ps, f0, f1, 0.1);
    CHECK(ps.hypotheses[0].weight > ps.hypotheses[1].weight);
}

TEST_CASE("update validates frames") {
    ParticleSet ps = init_posterior(10, 3, 0.1);
    ObservationFrame f0{0.0, {{0, {0.0, 0.0}}}, 0};
    ObservationFrame missing{0.1, {{5, {1.0, 0.0}}}, 0};
    CHECK_THROWS_AS(update(ps, f0, missing, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(update(ps, f0, f0, 0.0), std::invalid_argument);
}

TEST_CASE("inference on a synthetic overtaking run recovers dominance") {
    const DominanceModel model;
    const MotionParams truth = acceptance::detail::inference_truth(3);
    const double d_true = model.evaluate(truth).clamped;
    const RunResult run = run_scenario(acceptance::detail::inference_scene(truth, 3));

    InferenceConfig cfg;
    cfg.model = model;
    cfg.seed = 3;
    cfg.num_particles = 1000;
    cfg.sigma_obs = 0.003;
    const auto timeline = infer_trajectory(run.trajectories, 0, cfg);
    REQUIRE(!timeline.empty());
    CHECK(std::fabs(timeline.back().dominance.clamped - d_true) <= 0.15);
}

TEST_CASE("a short unobstructed run pins down the preferred speed") {
    const DominanceModel model;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        // Only pref_speed is observable in 50 free-flight frames; the other
        // dimensions sit at the center of the prior so the posterior mean of
        // the unidentified dimensions carries no dominance bias.
        MotionParams truth;
        truth.neighbor_dist = 16.5;
        truth.max_neighbors = 20.5;
        truth.planning_horizon = 12.5;
        truth.radius = 1.15;
        std::mt19937_64 rng(seed * 131);
        truth.pref_speed = std::uniform_real_distribution<double>(1.2, 2.2)(rng);

        Scenario sc;
        sc.kind = ScenarioKind::Custom;
        sc.termination = Termination::MaxTicks;
        sc.max_ticks = 50;
        AgentState a;
        a.id = 0;
        a.position = {0.0, 0.0};
        a.goal = {200.0, 0.0};
        a.params = truth;
        sc.agents.push_back(a);
        const RunResult run = run_scenario(sc);

        InferenceConfig cfg;
        cfg.model = model;
        cfg.seed = seed;
        cfg.sigma_obs = 0.05;
        const auto timeline = infer_trajectory(run.trajectories, 0, cfg);
        const MotionParams est = timeline.back().est.params;
        CHECK(std::fabs(est.pref_speed - truth.pref_speed) <= 0.1 * truth.pref_speed);
        CHECK(std::fabs(timeline.back().dominance.clamped - model.evaluate(truth).clamped) <=
              0.1);
    }
}

TEST_CASE("infer_trajectory needs at least three frames") {
    TrajectorySet traj;
    traj.agents.push_back({0, {{0, {0.0, 0.0}, {}}, {1, {0.1, 0.0}, {}}}});
    InferenceConfig cfg;
    CHECK_THROWS_AS(infer_trajectory(traj, 0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(infer_trajectory(traj, 9, cfg), std::invalid_argument);
}

TEST_CASE("inference is deterministic for a fixed seed") {
    Scenario sc = build_scenario(ScenarioKind::Corridor, {}, 2);
    sc.termination = Termination::MaxTicks;
    sc.max_ticks = 40;
    const RunResult run = run_scenario(sc);

    InferenceConfig cfg;
    cfg.seed = 17;
    const auto a = infer_trajectory(run.trajectories, 0, cfg);
    const auto b = infer_trajectory(run.trajectories, 0, cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].dominance.raw == b[i].dominance.raw);
        CHECK(a[i].est.params == b[i].est.params);
    }
}
