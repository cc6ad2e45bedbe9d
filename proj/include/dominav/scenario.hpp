// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dominav/world.hpp"

namespace dominav {

enum class ScenarioKind { PassThrough, Corridor, StandingGroup, NarrowExit, Custom };

enum class Termination { AllAtGoal, HighlightedAtGoal, MaxTicks };

// Robot controller knobs carried in scenario files.
struct RobotControllerConfig {
    double replan_period = 1.0;              // s
    std::array<double, 5> cost_weights{1.0, 1.0, 1.0, 1.0, 1.0};
    double pedestrian_filter_radius = 0.0;   // 0 disables the radius filter
};

// Vehicle block carried in scenario files.
struct VehicleConfig {
    std::vector<Vec2> path;      // fixed path polyline
    double v_max = 3.0;          // m/s
    double radius = 1.0;         // m, disc footprint
    double c_ped = 1.0;
    double s = 1.0;              // safety variable in [0, 1]
    double tau_d = 0.5;          // yield threshold on dominance
    double lookahead = 8.0;      // m of path forming the conflict region
    bool invert_dominance_sign = false;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::Custom;
    std::string name = "custom";
    std::vector<AgentState> agents;
    std::vector<Segment> obstacles;
    AgentId highlighted = 0;
    Termination termination = Termination::HighlightedAtGoal;
    std::int64_t max_ticks = 3000;
    double dt = 0.1;
    std::uint64_t seed = 0;
    std::optional<RobotControllerConfig> controller;
    std::optional<VehicleConfig> vehicle;

    // Exit line of the narrow-exit gap, when the scenario has one.
    std::optional<Segment> exit_line;

    WorldState initial_world() const {
        WorldState w;
        w.agents = agents;
        w.obstacles = obstacles;
        return w;
    }
};

struct TrajectoryFrame {
    std::int64_t tick = 0;
    Vec2 position;
    Vec2 velocity;
};

struct AgentTrajectory {
    AgentId id = 0;
    std::vector<TrajectoryFrame> frames;
};

struct TrajectorySet {
    double dt = 0.1;
    std::vector<AgentTrajectory> agents;

    const AgentTrajectory* find(AgentId id) const {
        for (const auto& a : agents) {
            if (a.id == id) return &a;
        }
        return nullptr;
    }
};

struct RunResult {
    TrajectorySet trajectories;
    bool completed = true;  // false when the tick cap hit first
    std::int64_t ticks = 0;
    WorldState final_world;
};

namespace scenario_detail {

inline MotionParams apply_overrides(const std::map<std::string, double>& overrides, bool clamp) {
    auto p = MotionParams::defaults();
    for (const auto& [key, value] : overrides) {
        if (key == "neighbor_dist") p.neighbor_dist = value;
        else if (key == "max_neighbors") p.max_neighbors = value;
        else if (key == "planning_horizon") p.planning_horizon = value;
        else if (key == "radius") p.radius = value;
        else if (key == "pref_speed") p.pref_speed = value;
        else throw std::invalid_argument("unknown parameter override: " + key);
    }
    if (clamp) return p.clamped();
    if (!p.in_bounds()) throw std::invalid_argument("parameter override out of table bounds");
    return p;
}

inline AgentState make_agent(AgentId id, Vec2 pos, Vec2 goal, AgentKind kind = AgentKind::Pedestrian,
                             MotionParams params = MotionParams::defaults()) {
    AgentState a;
    a.id = id;
    a.position = pos;
    a.goal = kind == AgentKind::Standing ? pos : goal;
    a.params = params;
    a.kind = kind;
    return a;
}

}  // namespace scenario_detail

// Builds one of the four named scenarios. The highlighted agent has id 0 and
// carries the overrides; everyone else runs the default parameters.
inline Scenario build_scenario(ScenarioKind kind, const std::map<std::string, double>& overrides = {},
                               std::uint64_t seed = 0, bool clamp_overrides = false) {
    using scenario_detail::make_agent;
    const MotionParams hp = scenario_detail::apply_overrides(overrides, clamp_overrides);

    Scenario sc;
    sc.kind = kind;
    sc.seed = seed;
    std::mt19937_64 rng(seed);

    switch (kind) {
        case ScenarioKind::PassThrough: {
            sc.name = "pass_through";
            sc.agents.push_back(make_agent(0, {-10.0, 0.0}, {10.0, 0.0}, AgentKind::Pedestrian, hp));
            // 8 x 5 block flowing +y inside a 10 m wide band.
            std::uniform_real_distribution<double> jitter(-0.15, 0.15);
            AgentId id = 1;
            for (int row = 0; row < 8; ++row) {
                for (int col = 0; col < 5; ++col) {
                    const Vec2 pos{-4.0 + 2.0 * col + jitter(rng), -12.0 + 2.0 * row + jitter(rng)};
                    sc.agents.push_back(make_agent(id++, pos, {pos.x, pos.y + 40.0}));
                }
            }
            sc.max_ticks = 3000;
            break;
        }
        case ScenarioKind::Corridor: {
            sc.name = "corridor";
            sc.obstacles.push_back({{-15.0, 2.0}, {15.0, 2.0}});
            sc.obstacles.push_back({{-15.0, -2.0}, {15.0, -2.0}});
            sc.agents.push_back(make_agent(0, {-14.0, 0.0}, {14.0, 0.0}, AgentKind::Pedestrian, hp));
            const Vec2 starts[5] = {{12.0, -1.0}, {12.0, 1.0}, {13.7, 0.0}, {15.4, -1.0}, {15.4, 1.0}};
            for (int i = 0; i < 5; ++i) {
                sc.agents.push_back(make_agent(i + 1, starts[i], {-14.0, starts[i].y * 0.5}));
            }
            sc.max_ticks = 3000;
            break;
        }
        case ScenarioKind::StandingGroup: {
            sc.name = "standing_group";
            sc.agents.push_back(make_agent(0, {-8.0, 0.0}, {8.0, 0.0}, AgentKind::Pedestrian, hp));
            const Vec2 cross[5] = {{0.0, 0.0}, {2.0, 0.0}, {-2.0, 0.0}, {0.0, 2.0}, {0.0, -2.0}};
            for (int i = 0; i < 5; ++i) {
                sc.agents.push_back(make_agent(i + 1, cross[i], cross[i], AgentKind::Standing));
            }
            sc.max_ticks = 2000;
            break;
        }
        case ScenarioKind::NarrowExit: {
            sc.name = "narrow_exit";
            // 20 m square room, 2.4 m gap centered in the +x wall. Bodies are
            // 1.6 m across, so the gap still forces near single-file flow.
            sc.obstacles.push_back({{-10.0, -10.0}, {-10.0, 10.0}});
            sc.obstacles.push_back({{-10.0, 10.0}, {10.0, 10.0}});
            sc.obstacles.push_back({{-10.0, -10.0}, {10.0, -10.0}});
            sc.obstacles.push_back({{10.0, 1.2}, {10.0, 10.0}});
            sc.obstacles.push_back({{10.0, -10.0}, {10.0, -1.2}});
            sc.exit_line = Segment{{10.0, -1.2}, {10.0, 1.2}};

            // 31 agents seeded uniformly, at least 2 m apart.
            std::uniform_real_distribution<double> ux(-8.5, 6.0);
            std::uniform_real_distribution<double> uy(-8.5, 8.5);
            std::vector<Vec2> placed;
            while (placed.size() < 31) {
                const Vec2 candidate{ux(rng), uy(rng)};
                bool ok = true;
                for (const Vec2& p : placed) {
                    if (norm(candidate - p) < 2.0) { ok = false; break; }
                }
                if (ok) placed.push_back(candidate);
            }
            sc.agents.push_back(make_agent(0, placed[0], {14.0, 0.0}, AgentKind::Pedestrian, hp));
            // Goals near the gap axis so everyone funnels through the exit
            // (an off-axis goal leaves its agent pressing the wall at the
            // goal's height forever, since preferred velocity aims straight
            // at the goal), unique and strung far downstream so agents that
            // have arrived do not clog the gap for the ones still inside.
            for (int i = 1; i < 31; ++i) {
                const Vec2 goal{14.0 + 2.0 * i, 0.5 * (i % 3 - 1)};
                sc.agents.push_back(make_agent(i, placed[static_cast<size_t>(i)], goal));
            }
            sc.max_ticks = 3000;
            break;
        }
        case ScenarioKind::Custom:
            throw std::invalid_argument("build_scenario: Custom requires a full scene description");
    }
    sc.highlighted = 0;
    return sc;
}

inline bool run_terminated(const Scenario& sc, const WorldState& world) {
    switch (sc.termination) {
        case Termination::AllAtGoal: {
            for (const auto& a : world.agents) {
                if (a.kind != AgentKind::Standing && !a.at_goal()) return false;
            }
            return true;
        }
        case Termination::HighlightedAtGoal: {
            const AgentState* h = world.find(sc.highlighted);
            return h == nullptr || h->at_goal();
        }
        case Termination::MaxTicks:
            return false;
    }
    return false;
}

// Steps the scenario to termination or the tick cap. Deterministic: two runs
// of the same scenario produce identical trajectories.
inline RunResult run_scenario(const Scenario& scenario) {
    RunResult result;
    result.trajectories.dt = scenario.dt;
    WorldState world = scenario.initial_world();

    result.trajectories.agents.reserve(world.agents.size());
    for (const auto& a : world.agents) result.trajectories.agents.push_back({a.id, {}});

    auto record = [&](const WorldState& w) {
        for (size_t i = 0; i < w.agents.size(); ++i) {
            result.trajectories.agents[i].frames.push_back(
                {w.tick, w.agents[i].position, w.agents[i].velocity});
        }
    };

    if (!world.agents.empty()) record(world);
    bool terminated = world.agents.empty() || run_terminated(scenario, world);
    while (!terminated && world.tick < scenario.max_ticks) {
        world = step(world, scenario.dt);
        record(world);
        terminated = run_terminated(scenario, world);
    }
    result.completed = scenario.termination == Termination::MaxTicks ? true : terminated;
    result.ticks = world.tick;
    result.final_world = std::move(world);
    return result;
}

}  // namespace dominav
