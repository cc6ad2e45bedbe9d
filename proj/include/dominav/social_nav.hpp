// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dominav/dominance.hpp"
#include "dominav/inference.hpp"
#include "dominav/scenario.hpp"
#include "dominav/world.hpp"

namespace dominav {

struct ComplementTarget {
    double d_des = 0.5;
    std::vector<AgentId> contributors;
    std::vector<double> dominances;
};

// Per-dimension weights of the robot's navigation cost, applied to the
// normalized parameter vector.
struct NavCost {
    std::array<double, 5> weights{1.0, 1.0, 1.0, 1.0, 1.0};
};

// Mean of complements: the closed-form minimizer of sum_i (d - (1 - d_i))^2.
inline ComplementTarget desired_dominance(const std::vector<double>& d_list) {
    if (d_list.empty()) throw std::invalid_argument("desired_dominance: empty dominance list");
    double sum = 0.0;
    for (double d : d_list) sum += 1.0 - d;
    ComplementTarget t;
    t.d_des = sum / static_cast<double>(d_list.size());
    t.dominances = d_list;
    return t;
}

struct SelectResult {
    MotionParams params;
    double achieved_raw = 0.0;
    bool attainable = true;
    double nearest_attainable = 0.0;  // meaningful when !attainable
    std::array<double, 5> normalized{};  // solution before max_neighbors rounding
};

namespace social_detail {

inline std::array<double, 5> normalized_box_min(const NormalizationSpec& norm) {
    std::array<double, 5> lo{};
    for (int k = 0; k < 5; ++k) lo[k] = (MotionParams::kMin[k] - norm.defaults[k]) / norm.half_ranges[k];
    return lo;
}

inline std::array<double, 5> normalized_box_max(const NormalizationSpec& norm) {
    std::array<double, 5> hi{};
    for (int k = 0; k < 5; ++k) hi[k] = (MotionParams::kMax[k] - norm.defaults[k]) / norm.half_ranges[k];
    return hi;
}

// Weighted least-norm solve of D.x = target over the free dimensions.
// Zero-weight free dimensions are cost-free and absorb the whole target.
inline void solve_free(const std::array<double, 5>& coeffs, const NavCost& cost,
                       const std::array<bool, 5>& fixed, double target,
                       std::array<double, 5>& x) {
    bool any_zero_weight = false;
    for (int k = 0; k < 5; ++k) {
        if (!fixed[k] && cost.weights[k] == 0.0 && coeffs[k] != 0.0) any_zero_weight = true;
    }
    double denom = 0.0;
    for (int k = 0; k < 5; ++k) {
        if (fixed[k] || coeffs[k] == 0.0) continue;
        if (any_zero_weight) {
            if (cost.weights[k] == 0.0) denom += coeffs[k] * coeffs[k];
        } else {
            denom += coeffs[k] * coeffs[k] / cost.weights[k];
        }
    }
    if (denom == 0.0) return;  // no usable free dimension
    const double lambda = target / denom;
    for (int k = 0; k < 5; ++k) {
        if (fixed[k] || coeffs[k] == 0.0) continue;
        if (any_zero_weight) {
            x[k] = cost.weights[k] == 0.0 ? lambda * coeffs[k] : 0.0;
        } else {
            x[k] = lambda * coeffs[k] / cost.weights[k];
        }
    }
}

}  // namespace social_detail

// Picks the cheapest parameters whose dominance equals d_des, clipped to the
// table bounds with active-set re-solves when clipping moves the score.
inline SelectResult select_params(const DominanceModel& model, double d_des, const NavCost& cost) {
    if (!std::isfinite(d_des)) throw std::invalid_argument("select_params: non-finite target");
    bool any_positive = false;
    for (double w : cost.weights) {
        if (w < 0.0) throw std::invalid_argument("select_params: negative cost weight");
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive) throw std::invalid_argument("select_params: all cost weights zero");

    const auto lo = social_detail::normalized_box_min(model.norm);
    const auto hi = social_detail::normalized_box_max(model.norm);
    const auto [d_min, d_max] = model.attainable_range();

    SelectResult res;
    if (d_des < d_min - 1e-9 || d_des > d_max + 1e-9) {
        // Report the nearest attainable value and the extreme corner params.
        res.attainable = false;
        res.nearest_attainable = std::min(d_max, std::max(d_min, d_des));
        std::array<double, 5> corner{};
        for (int k = 0; k < 5; ++k) {
            const bool want_high = (d_des > d_max) == (model.coeffs[k] > 0.0);
            corner[k] = want_high ? hi[k] : lo[k];
        }
        res.normalized = corner;
        res.params = denormalize(corner, model.norm, /*clamp=*/true);
        res.achieved_raw = model.raw(normalize(res.params, model.norm));
        return res;
    }

    std::array<double, 5> x{};
    std::array<bool, 5> fixed{};
    for (int pass = 0; pass < 5; ++pass) {
        double residual = d_des;
        for (int k = 0; k < 5; ++k) {
            if (fixed[k]) residual -= model.coeffs[k] * x[k];
        }
        social_detail::solve_free(model.coeffs, cost, fixed, residual, x);
        bool clipped = false;
        for (int k = 0; k < 5; ++k) {
            if (fixed[k]) continue;
            if (x[k] < lo[k]) { x[k] = lo[k]; fixed[k] = true; clipped = true; }
            else if (x[k] > hi[k]) { x[k] = hi[k]; fixed[k] = true; clipped = true; }
        }
        if (!clipped) break;
    }
    res.normalized = x;

    // Rounding max_neighbors may shift the score; re-solve over the rest.
    const double mn_value = std::round(model.norm.defaults[1] + model.norm.half_ranges[1] * x[1]);
    x[1] = (std::min(MotionParams::kMax[1], std::max(MotionParams::kMin[1], mn_value)) -
            model.norm.defaults[1]) / model.norm.half_ranges[1];
    fixed[1] = true;
    {
        double residual = d_des;
        for (int k = 0; k < 5; ++k) {
            if (fixed[k]) residual -= model.coeffs[k] * x[k];
        }
        social_detail::solve_free(model.coeffs, cost, fixed, residual, x);
        for (int k = 0; k < 5; ++k) x[k] = std::min(hi[k], std::max(lo[k], x[k]));
    }

    res.params = denormalize(x, model.norm, /*clamp=*/true);
    res.achieved_raw = model.raw(normalize(res.params, model.norm));
    return res;
}

struct ReplanOutcome {
    SelectResult selection;
    double d_des = 0.0;
    bool used_defaults = false;  // no pedestrians in range
};

// Composes complement aggregation and parameter selection for one robot, and
// installs the result on the robot agent.
inline ReplanOutcome robot_replan(WorldState& world, AgentId robot, const DominanceModel& model,
                                  const std::map<AgentId, DominanceScore>& estimates,
                                  const NavCost& cost, double filter_radius = 0.0) {
    AgentState* r = world.find(robot);
    if (r == nullptr) throw std::invalid_argument("robot_replan: unknown robot id");

    std::vector<double> d_list;
    for (const auto& a : world.agents) {
        if (a.kind != AgentKind::Pedestrian || a.externally_driven) continue;
        if (filter_radius > 0.0 && norm(a.position - r->position) > filter_radius) continue;
        const auto it = estimates.find(a.id);
        if (it == estimates.end()) throw std::invalid_argument("robot_replan: missing estimate");
        d_list.push_back(it->second.clamped);
    }

    ReplanOutcome out;
    if (d_list.empty()) {
        out.used_defaults = true;
        out.selection.params = MotionParams::defaults();
        out.selection.achieved_raw = 0.0;
        out.d_des = 0.0;
        r->params = out.selection.params;
        return out;
    }
    out.d_des = desired_dominance(d_list).d_des;
    out.selection = select_params(model, out.d_des, cost);
    r->params = out.selection.params;
    return out;
}

struct ReplanLogRow {
    double time = 0.0;
    AgentId robot = 0;
    double d_des = 0.0;
    double achieved_raw = 0.0;
    MotionParams params;
};

struct NavigateResult {
    RunResult run;
    std::vector<ReplanLogRow> replan_log;
};

// Closed-loop run: robot agents replan their parameters on a fixed period,
// with pedestrian dominance estimated online by per-pedestrian particle
// filters fed from the simulated observations.
inline NavigateResult run_navigation(const Scenario& scenario, const DominanceModel& model,
                                     const InferenceConfig& inference_base,
                                     const NavCost& cost = {}) {
    const RobotControllerConfig controller = scenario.controller.value_or(RobotControllerConfig{});
    WorldState world = scenario.initial_world();

    std::vector<AgentId> robots, pedestrians;
    for (const auto& a : world.agents) {
        if (a.kind == AgentKind::Robot) robots.push_back(a.id);
        // Externally driven agents are scripted playback, not subjects whose
        // motion parameters the sim explains; they stay background traffic.
        if (a.kind == AgentKind::Pedestrian && !a.externally_driven) pedestrians.push_back(a.id);
    }

    std::map<AgentId, ParticleSet> filters;
    std::map<AgentId, Vec2> first_seen;
    for (size_t i = 0; i < pedestrians.size(); ++i) {
        filters.emplace(pedestrians[i],
                        init_posterior(inference_base.num_particles,
                                       inference_base.seed + i, inference_base.sigma_obs));
        first_seen.emplace(pedestrians[i], world.find(pedestrians[i])->position);
    }

    auto snapshot = [&](const WorldState& w) {
        std::map<AgentId, Vec2> positions;
        for (const auto& a : w.agents) positions[a.id] = a.position;
        return positions;
    };

    NavigateResult result;
    result.run.trajectories.dt = scenario.dt;
    for (const auto& a : world.agents) result.run.trajectories.agents.push_back({a.id, {}});
    auto record = [&](const WorldState& w) {
        for (size_t i = 0; i < w.agents.size(); ++i) {
            result.run.trajectories.agents[i].frames.push_back(
                {w.tick, w.agents[i].position, w.agents[i].velocity});
        }
    };

    const auto replan_every =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(controller.replan_period / scenario.dt)));
    NavCost nav_cost = cost;
    nav_cost.weights = controller.cost_weights;

    record(world);
    auto prev_positions = snapshot(world);
    bool terminated = run_terminated(scenario, world);
    while (!terminated && world.tick < scenario.max_ticks) {
        world = step(world, scenario.dt);
        record(world);

        const auto positions = snapshot(world);
        for (AgentId ped : pedestrians) {
            // A standing person (arrived, or waiting) tells a goal-directed
            // motion model nothing; updating on those frames only teaches the
            // filter that the person is "slow".
            if (norm(positions.at(ped) - prev_positions.at(ped)) / scenario.dt < 0.1) continue;
            ObservationFrame ft{world.time - scenario.dt, prev_positions, ped};
            ObservationFrame fn{world.time, positions, ped};
            // Base course from the displacement since first sight: a brief
            // avoidance swerve barely moves it, unlike the current heading.
            std::optional<Vec2> course;
            const Vec2 disp = positions.at(ped) - first_seen.at(ped);
            if (world.time > 0.0 && norm(disp) / world.time > 0.2) course = disp;
            update(filters.at(ped), ft, fn, scenario.dt, world.obstacles, course);
        }
        prev_positions = positions;

        if (world.tick % replan_every == 0) {
            std::map<AgentId, DominanceScore> estimates;
            for (AgentId ped : pedestrians) {
                estimates[ped] = model.evaluate(estimate(filters.at(ped)).params);
            }
            for (AgentId robot : robots) {
                const ReplanOutcome out = robot_replan(world, robot, model, estimates, nav_cost,
                                                       controller.pedestrian_filter_radius);
                result.replan_log.push_back({world.time, robot, out.d_des,
                                             out.selection.achieved_raw, out.selection.params});
            }
        }
        terminated = run_terminated(scenario, world);
    }
    result.run.completed = scenario.termination == Termination::MaxTicks ? true : terminated;
    result.run.ticks = world.tick;
    result.run.final_world = std::move(world);
    return result;
}

}  // namespace dominav
