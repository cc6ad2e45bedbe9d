// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dominav/motion_params.hpp"
#include "dominav/orca.hpp"
#include "dominav/vec2.hpp"

namespace dominav {

using AgentId = std::int32_t;

enum class AgentKind { Pedestrian, Robot, Standing };

struct AgentState {
    AgentId id = 0;
    Vec2 position;
    Vec2 velocity;
    Vec2 goal;
    MotionParams params;
    AgentKind kind = AgentKind::Pedestrian;
    // Externally driven agents (e.g. a vehicle footprint) keep the velocity
    // set by their controller instead of solving ORCA.
    bool externally_driven = false;

    bool at_goal(double threshold = kGoalThreshold) const {
        return norm(goal - position) <= threshold;
    }

    static constexpr double kGoalThreshold = 0.25;
};

struct WorldState {
    std::int64_t tick = 0;
    double time = 0.0;
    std::vector<AgentState> agents;
    std::vector<Segment> obstacles;

    const AgentState* find(AgentId id) const {
        for (const auto& a : agents) {
            if (a.id == id) return &a;
        }
        return nullptr;
    }
    AgentState* find(AgentId id) {
        return const_cast<AgentState*>(static_cast<const WorldState*>(this)->find(id));
    }
};

// Agents within neighbor_dist of the query agent (closed ball), nearest
// first, truncated to max_neighbors. Ties are broken by id.
inline std::vector<AgentId> neighbors_of(const WorldState& world, AgentId agent) {
    const AgentState* self = world.find(agent);
    if (self == nullptr) throw std::invalid_argument("neighbors_of: unknown agent id");

    std::vector<std::pair<double, AgentId>> candidates;
    const double max_dist_sq = self->params.neighbor_dist * self->params.neighbor_dist;
    for (const auto& other : world.agents) {
        if (other.id == agent) continue;
        const double d2 = norm_sq(other.position - self->position);
        if (d2 <= max_dist_sq) candidates.emplace_back(d2, other.id);
    }
    std::sort(candidates.begin(), candidates.end());
    const auto cap = static_cast<size_t>(std::max(0.0, std::round(self->params.max_neighbors)));
    if (candidates.size() > cap) candidates.resize(cap);

    std::vector<AgentId> ids;
    ids.reserve(candidates.size());
    for (const auto& [d2, id] : candidates) ids.push_back(id);
    return ids;
}

// Goal-directed preferred velocity: full preferred speed until within one
// step of the goal, zero once arrived.
inline Vec2 preferred_velocity(const AgentState& agent, double dt) {
    if (agent.kind == AgentKind::Standing) return {0.0, 0.0};
    const Vec2 to_goal = agent.goal - agent.position;
    const double dist = norm(to_goal);
    if (dist <= AgentState::kGoalThreshold) return {0.0, 0.0};
    const double speed = std::min(agent.params.pref_speed, dist / dt);
    return normalized(to_goal) * speed;
}

// One ORCA solve for a single agent against explicit neighbor states.
inline Vec2 orca_velocity(const AgentState& agent, std::span<const AgentState> neighbors,
                          std::span<const Segment> obstacles, double dt) {
    OrcaAgent self{agent.position, agent.velocity, preferred_velocity(agent, dt),
                   agent.params.radius, agent.params.max_speed(),
                   agent.params.planning_horizon};
    std::vector<OrcaNeighbor> views;
    views.reserve(neighbors.size());
    for (const auto& n : neighbors) {
        views.push_back({n.position, n.velocity, n.params.radius});
    }
    return solve_orca(self, views, obstacles, dt).velocity;
}

namespace world_detail {

constexpr double kOverlapEps = 1e-3;

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return det(b - a, c - a);
}

inline bool segments_cross(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) {
    const double d1 = orient(a, b, p);
    const double d2 = orient(a, b, q);
    const double d3 = orient(p, q, a);
    const double d4 = orient(p, q, b);
    return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

// Moves an agent only if its centre's path does not cross a wall; a jammed
// crowd must not be able to squeeze anyone through an obstacle.
inline void push_agent(AgentState& agent, const Vec2& displacement,
                       const std::vector<Segment>& obstacles) {
    const Vec2 target = agent.position + displacement;
    for (const Segment& s : obstacles) {
        if (segments_cross(agent.position, target, s.a, s.b)) return;
    }
    agent.position = target;
}

// Pushes overlapping pairs apart symmetrically. ORCA rarely produces
// interpenetration, but jammed exits can momentarily defeat the LP; the
// separation invariant is restored here before the step returns.
inline void resolve_overlaps(std::vector<AgentState>& agents,
                             const std::vector<Segment>& obstacles) {
    for (int sweep = 0; sweep < 16; ++sweep) {
        bool any = false;
        for (size_t i = 0; i < agents.size(); ++i) {
            for (size_t j = i + 1; j < agents.size(); ++j) {
                const double min_dist = agents[i].params.radius + agents[j].params.radius;
                const Vec2 delta = agents[j].position - agents[i].position;
                const double dist = norm(delta);
                if (dist >= min_dist - kOverlapEps * 0.5) continue;
                any = true;
                const Vec2 dir = dist > 1e-9 ? delta / dist
                                             : Vec2{1.0, 0.0};  // coincident centers
                const double push = 0.5 * (min_dist - dist);
                push_agent(agents[i], -dir * push, obstacles);
                push_agent(agents[j], dir * push, obstacles);
            }
        }
        if (!any) return;
    }
}

}  // namespace world_detail

// Synchronous simulation step: every new velocity is computed from the
// previous tick's states, so the result is independent of agent order.
inline WorldState step(const WorldState& world, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("step: dt must be positive");

    WorldState next = world;
    std::vector<Vec2> new_velocities(world.agents.size());
    for (size_t i = 0; i < world.agents.size(); ++i) {
        const AgentState& agent = world.agents[i];
        if (agent.externally_driven) {
            new_velocities[i] = agent.velocity;
            continue;
        }
        std::vector<AgentState> neighbor_states;
        for (AgentId id : neighbors_of(world, agent.id)) {
            neighbor_states.push_back(*world.find(id));
        }
        new_velocities[i] = orca_velocity(agent, neighbor_states, world.obstacles, dt);
    }
    for (size_t i = 0; i < next.agents.size(); ++i) {
        next.agents[i].velocity = new_velocities[i];
        next.agents[i].position += new_velocities[i] * dt;
    }
    world_detail::resolve_overlaps(next.agents, next.obstacles);
    next.tick = world.tick + 1;
    next.time = static_cast<double>(next.tick) * dt;
    return next;
}

}  // namespace dominav
