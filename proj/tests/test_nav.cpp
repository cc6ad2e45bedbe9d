// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "dominav/social_nav.hpp"

using namespace dominav;

TEST_CASE("desired dominance is the mean of complements") {
    CHECK(desired_dominance({0.3}).d_des == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(desired_dominance({0.2, 0.6, 1.0}).d_des == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(desired_dominance({0.5, 0.5, 0.5, 0.5}).d_des == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(desired_dominance({}), std::invalid_argument);
}

TEST_CASE("desired dominance minimizes the summed squared complement error") {
    // Grid oracle over candidate d at 1e-4 resolution.
    const std::vector<double> d_list{0.2, 0.6, 1.0};
    auto objective = [&](double d) {
        double s = 0.0;
        for (double di : d_list) s += (d - (1.0 - di)) * (d - (1.0 - di));
        return s;
    };
    const double best = desired_dominance(d_list).d_des;
    for (double d = 0.0; d <= 1.0; d += 1e-4) {
        CHECK(objective(best) <= objective(d) + 1e-12);
    }
}

TEST_CASE("complement involution returns the original mean") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> list;
        double mean = 0.0;
        for (int i = 0; i < 6; ++i) {
            list.push_back(u(rng));
            mean += list.back();
        }
        mean /= 6.0;
        std::vector<double> complements;
        for (double d : list) complements.push_back(1.0 - desired_dominance({d}).d_des);
        CHECK(desired_dominance(complements).d_des ==
              doctest::Approx(1.0 - mean).epsilon(1e-12));
    }
}

TEST_CASE("select_params returns defaults for a zero target") {
    const DominanceModel model;
    const SelectResult res = select_params(model, 0.0, NavCost{});
    CHECK(res.attainable);
    CHECK(res.params == MotionParams::defaults());
    CHECK(res.achieved_raw == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("select_params matches the worked least-norm example") {
    const DominanceModel model;
    const SelectResult res = select_params(model, 0.4, NavCost{});
    CHECK(res.attainable);

    const double lambda = 0.4 / 0.1952;
    const std::array<double, 5> closed{lambda * 0.01, lambda * -0.07, lambda * -0.41,
                                       lambda * 0.05, lambda * 0.14};
    for (int k = 0; k < 5; ++k) {
        CHECK(res.normalized[k] == doctest::Approx(closed[k]).epsilon(1e-6));
    }
    CHECK(res.params.neighbor_dist == doctest::Approx(15.28).epsilon(1e-2));
    CHECK(res.params.max_neighbors == doctest::Approx(7.0));
    CHECK(res.params.planning_horizon == doctest::Approx(14.34).epsilon(1e-2));
    CHECK(res.params.radius == doctest::Approx(0.887).epsilon(1e-2));
    CHECK(res.params.pref_speed == doctest::Approx(1.543).epsilon(1e-2));
    // Rounding max_neighbors is compensated by the re-solve.
    CHECK(res.achieved_raw == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("select_params achieves feasible targets exactly") {
    const DominanceModel model;
    for (double target : {-0.1, 0.1, 0.25, 0.6, 0.85, 1.0, 1.1}) {
        const SelectResult res = select_params(model, target, NavCost{});
        CHECK(res.attainable);
        CHECK(res.achieved_raw == doctest::Approx(target).epsilon(1e-6));
        CHECK(res.params.in_bounds());
    }
}

TEST_CASE("select_params reports unattainable targets with the nearest value") {
    const DominanceModel model;
    const auto [lo, hi] = model.attainable_range();
    const SelectResult res = select_params(model, 5.0, NavCost{});
    CHECK_FALSE(res.attainable);
    CHECK(res.nearest_attainable == doctest::Approx(hi).epsilon(1e-9));
    CHECK(res.achieved_raw == doctest::Approx(hi).epsilon(1e-6));

    const SelectResult low = select_params(model, -5.0, NavCost{});
    CHECK_FALSE(low.attainable);
    CHECK(low.nearest_attainable == doctest::Approx(lo).epsilon(1e-9));
}

TEST_CASE("select_params validates the cost weights") {
    const DominanceModel model;
    NavCost bad;
    bad.weights = {1, 1, -1, 1, 1};
    CHECK_THROWS_AS(select_params(model, 0.3, bad), std::invalid_argument);
    NavCost zeros;
    zeros.weights = {0, 0, 0, 0, 0};
    CHECK_THROWS_AS(select_params(model, 0.3, zeros), std::invalid_argument);
}

TEST_CASE("weighted selection shifts effort to cheap dimensions") {
    const DominanceModel model;
    NavCost cost;
    cost.weights = {1.0, 1.0, 1.0, 1.0, 0.01};  // pref_speed nearly free
    const SelectResult res = select_params(model, 0.3, cost);
    CHECK(res.attainable);
    CHECK(res.achieved_raw == doctest::Approx(0.3).epsilon(1e-6));
    const SelectResult unit = select_params(model, 0.3, NavCost{});
    CHECK(std::fabs(res.normalized[4]) > std::fabs(unit.normalized[4]));
}

TEST_CASE("robot_replan installs complementary parameters") {
    const DominanceModel model;
    WorldState world;
    AgentState robot;
    robot.id = 0;
    robot.kind = AgentKind::Robot;
    world.agents.push_back(robot);
    for (int i = 1; i <= 3; ++i) {
        AgentState ped;
        ped.id = i;
        ped.position = {static_cast<double>(i), 0.0};
        ped.kind = AgentKind::Pedestrian;
        world.agents.push_back(ped);
    }
    std::map<AgentId, DominanceScore> estimates{{1, DominanceScore::from_raw(0.2)},
                                                {2, DominanceScore::from_raw(0.6)},
                                                {3, DominanceScore::from_raw(1.0)}};
    const ReplanOutcome out = robot_replan(world, 0, model, estimates, NavCost{});
    CHECK_FALSE(out.used_defaults);
    CHECK(out.d_des == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(model.evaluate(world.find(0)->params).raw == doctest::Approx(0.4).epsilon(1e-6));

    // Radius filter excluding everyone falls back to defaults.
    const ReplanOutcome empty = robot_replan(world, 0, model, estimates, NavCost{}, 0.5);
    CHECK(empty.used_defaults);
    CHECK(world.find(0)->params == MotionParams::defaults());
    CHECK_THROWS_AS(robot_replan(world, 42, model, estimates, NavCost{}), std::invalid_argument);
}

TEST_CASE("robot deviates more against a dominant crowd than a submissive one") {
    const DominanceModel model;
    auto build = [&](double crowd_dominance) {
        Scenario sc;
        sc.kind = ScenarioKind::Custom;
        sc.termination = Termination::HighlightedAtGoal;
        sc.max_ticks = 800;
        AgentState robot;
        robot.id = 0;
        robot.position = {-12.0, 0.0};
        robot.goal = {12.0, 0.0};
        robot.kind = AgentKind::Robot;
        sc.agents.push_back(robot);
        const MotionParams crowd_params =
            crowd_dominance >= 1.0 ? MotionParams::checked(15, 10, 1, 0.8, 2.2)
                                   : MotionParams::checked(15, 40, 24, 0.8, 1.2);
        for (int i = 0; i < 4; ++i) {
            AgentState ped;
            ped.id = i + 1;
            ped.position = {10.0 + 1.8 * i, (i % 2 == 0) ? -0.4 : 0.4};
            ped.goal = {-14.0, ped.position.y};
            ped.params = crowd_params;
            sc.agents.push_back(ped);
        }
        sc.controller = RobotControllerConfig{};
        return sc;
    };
    auto max_lateral = [&](const Scenario& sc) {
        InferenceConfig icfg;
        icfg.model = model;
        icfg.seed = 2;
        const NavigateResult nav = run_navigation(sc, model, icfg);
        double worst = 0.0;
        for (const auto& f : nav.run.trajectories.find(0)->frames) {
            worst = std::max(worst, std::fabs(f.position.y));
        }
        return worst;
    };
    CHECK(max_lateral(build(1.0)) > max_lateral(build(0.0)));
}
