// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dominav/dominance.hpp"
#include "dominav/scenario.hpp"
#include "dominav/world.hpp"

namespace dominav {

enum class VehicleMode { Proceed, Yielding };

struct ProximityConfig {
    double c_ped = 1.0;
    double s = 1.0;  // safety variable in [0, 1]
    // The written coefficient lowers the cost of dominant pedestrians; the
    // inverted variant raises it instead.
    bool invert_dominance_sign = false;
    // Blind mode ignores dominance entirely: flat coefficient, and yield on
    // any predicted conflict. An s = 0 run behaves identically.
    bool dominance_blind = false;
};

struct VehicleState {
    Vec2 position;
    double heading = 0.0;
    double speed = 0.0;
    std::vector<Vec2> path;
    VehicleMode mode = VehicleMode::Proceed;
    double arc = 0.0;  // progress along the path polyline
};

// Pedestrian as seen by the vehicle controller.
struct VehiclePedestrian {
    Vec2 position;
    Vec2 velocity;
    double dominance = 0.0;  // clamped, in [0, 1]
    double radius = 0.8;
};

inline double ped_coefficient(const ProximityConfig& cfg, double d) {
    if (cfg.dominance_blind) return cfg.c_ped;
    const double sign = cfg.invert_dominance_sign ? 1.0 : -1.0;
    return cfg.c_ped * std::exp(sign * cfg.s * d);
}

inline double proximity_cost(const Vec2& p_i, const Vec2& p_v, const ProximityConfig& cfg,
                             double d) {
    return ped_coefficient(cfg, d) * std::exp(-norm(p_i - p_v));
}

namespace vehicle_detail {

inline double path_length(const std::vector<Vec2>& path) {
    double len = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) len += norm(path[i + 1] - path[i]);
    return len;
}

inline Vec2 point_at_arc(const std::vector<Vec2>& path, double arc) {
    double remaining = std::max(0.0, arc);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const double seg = norm(path[i + 1] - path[i]);
        if (remaining <= seg) return path[i] + normalized(path[i + 1] - path[i]) * remaining;
        remaining -= seg;
    }
    return path.back();
}

inline Vec2 tangent_at_arc(const std::vector<Vec2>& path, double arc) {
    double remaining = std::max(0.0, arc);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const double seg = norm(path[i + 1] - path[i]);
        if (remaining <= seg) return normalized(path[i + 1] - path[i]);
        remaining -= seg;
    }
    return normalized(path.back() - path[path.size() - 2]);
}

// Conflict region: the path polyline from the vehicle's current arc position
// out to the lookahead distance.
inline double dist_to_conflict_region(const std::vector<Vec2>& path, double arc_start,
                                      double lookahead, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    const double step = 0.25;
    for (double a = arc_start; a <= arc_start + lookahead; a += step) {
        best = std::min(best, norm(point_at_arc(path, a) - p));
    }
    return best;
}

}  // namespace vehicle_detail

// Predicts each pedestrian forward at constant velocity over a 3 s horizon;
// a conflict is a predicted approach within the combined radii of the
// conflict region. Dominant pedestrians trigger a yield; submissive ones are
// expected to stop. Blind or s = 0 vehicles yield on any conflict.
inline bool conflict_predicted(const VehicleState& vehicle, const VehiclePedestrian& ped,
                               const VehicleConfig& vc) {
    constexpr double kHorizon = 3.0;
    constexpr double kStep = 0.1;
    for (double t = 0.0; t <= kHorizon; t += kStep) {
        const Vec2 predicted = ped.position + ped.velocity * t;
        const double d = vehicle_detail::dist_to_conflict_region(vehicle.path, vehicle.arc,
                                                                 vc.lookahead, predicted);
        if (d <= vc.radius + ped.radius) return true;
    }
    return false;
}

enum class YieldDecision { Proceed, Yield };

inline YieldDecision yield_decision(const VehicleState& vehicle,
                                    const std::vector<VehiclePedestrian>& peds,
                                    const ProximityConfig& cfg, double tau_d,
                                    const VehicleConfig& vc) {
    for (const auto& ped : peds) {
        if (!conflict_predicted(vehicle, ped, vc)) continue;
        if (cfg.dominance_blind || cfg.s == 0.0) return YieldDecision::Yield;
        if (ped.dominance >= tau_d) return YieldDecision::Yield;
    }
    return YieldDecision::Proceed;
}

struct VehicleStepInfo {
    double chosen_speed = 0.0;
    double chosen_cost = 0.0;
    YieldDecision decision = YieldDecision::Proceed;
};

// Fixed-path speed selection: score {0, v_max/2, v_max} by path progress
// minus summed proximity costs at the predicted pose; Yielding pins the
// speed at zero until the conflict clears. Ties break toward lower speed.
inline VehicleStepInfo vehicle_step(VehicleState& vehicle,
                                    const std::vector<VehiclePedestrian>& peds,
                                    const VehicleConfig& vc, const ProximityConfig& cfg,
                                    double dt) {
    if (dt <= 0.0) throw std::invalid_argument("vehicle_step: dt must be positive");

    VehicleStepInfo info;
    info.decision = yield_decision(vehicle, peds, cfg, vc.tau_d, vc);
    if (info.decision == YieldDecision::Yield) {
        vehicle.mode = VehicleMode::Yielding;
    } else if (vehicle.mode == VehicleMode::Yielding) {
        vehicle.mode = VehicleMode::Proceed;  // conflict cleared
    }

    constexpr double kProgressWeight = 0.5;
    double best_score = -std::numeric_limits<double>::infinity();
    double best_speed = 0.0;
    double best_cost = 0.0;
    const double candidates[3] = {0.0, 0.5 * vc.v_max, vc.v_max};
    for (double speed : candidates) {
        if (vehicle.mode == VehicleMode::Yielding && speed > 0.0) continue;
        const Vec2 pose = vehicle_detail::point_at_arc(vehicle.path, vehicle.arc + speed * dt);
        double cost = 0.0;
        for (const auto& ped : peds) {
            const double d = cfg.dominance_blind ? 0.0 : ped.dominance;
            cost += proximity_cost(ped.position, pose, cfg, d);
        }
        const double score = kProgressWeight * speed - cost;
        if (score > best_score) {  // strict: ties keep the lower speed
            best_score = score;
            best_speed = speed;
            best_cost = cost;
        }
    }

    vehicle.speed = best_speed;
    vehicle.arc = std::min(vehicle.arc + best_speed * dt, vehicle_detail::path_length(vehicle.path));
    vehicle.position = vehicle_detail::point_at_arc(vehicle.path, vehicle.arc);
    const Vec2 tangent = vehicle_detail::tangent_at_arc(vehicle.path, vehicle.arc);
    vehicle.heading = std::atan2(tangent.y, tangent.x);
    info.chosen_speed = best_speed;
    info.chosen_cost = best_cost;
    return info;
}

struct VehicleLogRow {
    double time = 0.0;
    VehicleMode mode = VehicleMode::Proceed;
    double chosen_speed = 0.0;
    double min_ped_distance = 0.0;
    double max_ped_dominance = 0.0;
    double total_cost = 0.0;
};

struct VehicleRunResult {
    std::vector<VehicleLogRow> log;
    TrajectorySet trajectories;  // pedestrian trajectories
    std::vector<Vec2> vehicle_positions;
    double min_vehicle_ped_separation = std::numeric_limits<double>::infinity();
    bool reached_path_end = false;
};

// Full vehicle-pedestrian run. Pedestrian dominance comes from the model
// applied to their true parameters; the vehicle footprint participates in
// the pedestrians' collision avoidance as an externally driven disc.
inline VehicleRunResult run_vehicle(const Scenario& scenario, const DominanceModel& model) {
    if (!scenario.vehicle || scenario.vehicle->path.size() < 2) {
        throw std::invalid_argument("run_vehicle: scenario lacks a vehicle path");
    }
    const VehicleConfig& vc = *scenario.vehicle;
    ProximityConfig cfg{vc.c_ped, vc.s, vc.invert_dominance_sign, false};

    WorldState world = scenario.initial_world();
    VehicleState vehicle;
    vehicle.path = vc.path;
    vehicle.position = vc.path.front();

    // Footprint agent so pedestrians avoid the vehicle.
    constexpr AgentId kVehicleId = 1000;
    AgentState footprint;
    footprint.id = kVehicleId;
    footprint.position = vehicle.position;
    footprint.goal = vc.path.back();
    footprint.kind = AgentKind::Robot;
    footprint.externally_driven = true;
    footprint.params = MotionParams::defaults();
    footprint.params.radius = vc.radius;
    world.agents.push_back(footprint);

    VehicleRunResult result;
    result.trajectories.dt = scenario.dt;
    for (const auto& a : scenario.agents) result.trajectories.agents.push_back({a.id, {}});

    const double total_len = vehicle_detail::path_length(vc.path);
    while (world.tick < scenario.max_ticks && vehicle.arc < total_len - 1e-9) {
        std::vector<VehiclePedestrian> peds;
        double max_dom = 0.0;
        double min_dist = std::numeric_limits<double>::infinity();
        for (const auto& a : world.agents) {
            if (a.kind != AgentKind::Pedestrian) continue;
            const double d = model.evaluate(a.params).clamped;
            peds.push_back({a.position, a.velocity, d, a.params.radius});
            max_dom = std::max(max_dom, d);
            min_dist = std::min(min_dist, norm(a.position - vehicle.position));
            result.min_vehicle_ped_separation =
                std::min(result.min_vehicle_ped_separation,
                         norm(a.position - vehicle.position) - vc.radius - a.params.radius);
        }

        const VehicleStepInfo info = vehicle_step(vehicle, peds, vc, cfg, scenario.dt);
        result.log.push_back({world.time, vehicle.mode, info.chosen_speed, min_dist, max_dom,
                              info.chosen_cost});
        result.vehicle_positions.push_back(vehicle.position);

        AgentState* fp = world.find(kVehicleId);
        fp->velocity = vehicle.speed * vehicle_detail::tangent_at_arc(vehicle.path, vehicle.arc);
        world = step(world, scenario.dt);
        world.find(kVehicleId)->position = vehicle.position;  // pin to the path

        for (size_t i = 0; i < result.trajectories.agents.size(); ++i) {
            const AgentState* a = world.find(result.trajectories.agents[i].id);
            result.trajectories.agents[i].frames.push_back({world.tick, a->position, a->velocity});
        }
    }
    result.reached_path_end = vehicle.arc >= total_len - 1e-9;
    return result;
}

}  // namespace dominav
