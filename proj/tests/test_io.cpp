// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dominav/io.hpp"

using namespace dominav;

TEST_CASE("trajectory CSV round-trips to 1e-6") {
    const Scenario sc = build_scenario(ScenarioKind::Corridor, {}, 3);
    Scenario short_run = sc;
    short_run.termination = Termination::MaxTicks;
    short_run.max_ticks = 25;
    const RunResult run = run_scenario(short_run);

    std::ostringstream out;
    write_trajectories(out, run.trajectories);
    std::istringstream in(out.str());
    const TrajectorySet back = read_trajectories(in);

    REQUIRE(back.agents.size() == run.trajectories.agents.size());
    CHECK(back.dt == doctest::Approx(run.trajectories.dt).epsilon(1e-9));
    for (size_t i = 0; i < back.agents.size(); ++i) {
        const auto& a = run.trajectories.agents[i];
        const auto& b = back.agents[i];
        REQUIRE(a.frames.size() == b.frames.size());
        for (size_t f = 0; f < a.frames.size(); ++f) {
            CHECK(b.frames[f].tick == a.frames[f].tick);
            CHECK(std::fabs(b.frames[f].position.x - a.frames[f].position.x) <= 1e-6);
            CHECK(std::fabs(b.frames[f].position.y - a.frames[f].position.y) <= 1e-6);
            CHECK(std::fabs(b.frames[f].velocity.x - a.frames[f].velocity.x) <= 1e-6);
        }
    }
}

TEST_CASE("trajectory CSV rejects malformed input") {
    std::istringstream bad_header("x,y\n");
    CHECK_THROWS(read_trajectories(bad_header));
    std::istringstream bad_row("tick,time,agent_id,x,y,vx,vy\n1,0.1,0\n");
    CHECK_THROWS(read_trajectories(bad_row));
}

TEST_CASE("labeled samples CSV round-trips") {
    std::vector<LabeledSample> samples{
        {MotionParams{15, 10, 24, 0.8, 1.4}, 0.0},
        {MotionParams{3, 40, 1, 0.3, 2.2}, 0.91},
    };
    std::ostringstream out;
    write_samples(out, samples);
    std::istringstream in(out.str());
    const auto back = read_samples(in);
    REQUIRE(back.size() == 2);
    CHECK(back[1].params.max_neighbors == doctest::Approx(40.0));
    CHECK(back[1].label == doctest::Approx(0.91).epsilon(1e-9));
}

TEST_CASE("survey CSV parses rows") {
    std::istringstream in(
        "video_id,V_sub,V_with,V_dom,V_conf\n"
        "clip01,2.5,3.0,4.0,4.5\n");
    const auto rows = read_survey(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].first == "clip01");
    CHECK(aggregate_survey(rows[0].second) == doctest::Approx(((4.0 + 4.5 + 6 - 2.5 + 6 - 3.0) - 4) / 16));
}

TEST_CASE("model file round-trips") {
    DominanceModel model;
    model.coeffs = {0.011, -0.072, -0.405, 0.052, 0.139};
    std::ostringstream out;
    write_model(out, model);
    std::istringstream in(out.str());
    const DominanceModel back = read_model(in);
    for (int k = 0; k < 5; ++k) CHECK(back.coeffs[k] == doctest::Approx(model.coeffs[k]).epsilon(1e-9));
    CHECK(back.norm == model.norm);

    std::istringstream no_format("coeffs: 1 2 3 4 5\n");
    CHECK_THROWS(read_model(no_format));
}

TEST_CASE("scenario file round-trips including controller and vehicle blocks") {
    Scenario sc = build_scenario(ScenarioKind::Corridor, {{"pref_speed", 2.0}}, 9);
    sc.controller = RobotControllerConfig{0.5, {1, 2, 3, 4, 5}, 6.0};
    VehicleConfig vc;
    vc.path = {{-15.0, 0.0}, {0.0, 0.0}, {15.0, 3.0}};
    vc.v_max = 2.5;
    vc.tau_d = 0.6;
    vc.invert_dominance_sign = true;
    sc.vehicle = vc;

    std::ostringstream out;
    write_scenario(out, sc);
    std::istringstream in(out.str());
    const Scenario back = read_scenario(in);

    CHECK(back.kind == ScenarioKind::Corridor);
    CHECK(back.seed == 9);
    CHECK(back.agents.size() == sc.agents.size());
    CHECK(back.agents[0].params.pref_speed == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(back.obstacles.size() == 2);
    REQUIRE(back.controller.has_value());
    CHECK(back.controller->replan_period == doctest::Approx(0.5));
    CHECK(back.controller->cost_weights[2] == doctest::Approx(3.0));
    CHECK(back.controller->pedestrian_filter_radius == doctest::Approx(6.0));
    REQUIRE(back.vehicle.has_value());
    CHECK(back.vehicle->path.size() == 3);
    CHECK(back.vehicle->v_max == doctest::Approx(2.5));
    CHECK(back.vehicle->tau_d == doctest::Approx(0.6));
    CHECK(back.vehicle->invert_dominance_sign);

    // Round-tripped scenarios simulate identically.
    Scenario a = sc, b = back;
    a.termination = b.termination = Termination::MaxTicks;
    a.max_ticks = b.max_ticks = 20;
    std::ostringstream ta, tb;
    write_trajectories(ta, run_scenario(a).trajectories);
    write_trajectories(tb, run_scenario(b).trajectories);
    CHECK(ta.str() == tb.str());
}

TEST_CASE("scenario file rejects bad content") {
    std::istringstream unknown_key("format: 1\nwat: 3\n");
    CHECK_THROWS(read_scenario(unknown_key));
    std::istringstream bad_kind("format: 1\nagent: 0 ghost 0 0 1 1 15 10 24 0.8 1.4\n");
    CHECK_THROWS(read_scenario(bad_kind));
    std::istringstream out_of_bounds("format: 1\nagent: 0 pedestrian 0 0 1 1 15 10 24 0.8 9.9\n");
    CHECK_THROWS(read_scenario(out_of_bounds));
}

TEST_CASE("run report JSON round-trips") {
    RunReport r;
    r.scenario = "narrow_exit";
    r.seed = 12;
    r.completed = true;
    r.metrics = {{"exit_time", 14.25}, {"min_separation", 0.031}};
    r.artifacts = {"out/trajectories.csv"};
    const RunReport back = report_from_json(to_json(r));
    CHECK(back == r);

    nlohmann::json bad = to_json(r);
    bad["schema_version"] = 2;
    CHECK_THROWS(report_from_json(bad));
}

TEST_CASE("log writers emit the documented headers") {
    std::ostringstream replan;
    write_replan_log(replan, {});
    CHECK(replan.str() ==
          "time,robot_id,d_des,achieved_d,neighbor_dist,max_neighbors,planning_horizon,radius,"
          "pref_speed\n");

    std::ostringstream vehicle;
    write_vehicle_log(vehicle, {{1.5, VehicleMode::Yielding, 0.0, 2.0, 0.9, 0.1}});
    CHECK(vehicle.str().find("time,mode,chosen_speed,min_ped_distance,max_ped_dominance\n") == 0);
    CHECK(vehicle.str().find("yielding") != std::string::npos);

    std::ostringstream timeline;
    write_timeline(timeline, {}, 3);
    CHECK(timeline.str().find("dominance_raw,dominance_clamped") != std::string::npos);
}
