// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "dominav/scenario.hpp"
#include "dominav/vec2.hpp"

namespace dominav {

// First time the agent's path crosses the exit line, interpolated between
// ticks. Empty when the agent never crosses.
inline std::optional<double> metric_exit_time(const TrajectorySet& traj, AgentId agent,
                                              const Segment& exit_line) {
    const AgentTrajectory* t = traj.find(agent);
    if (t == nullptr) throw std::invalid_argument("metric_exit_time: agent absent");

    const Vec2 e = exit_line.b - exit_line.a;
    for (size_t i = 0; i + 1 < t->frames.size(); ++i) {
        const Vec2 p0 = t->frames[i].position;
        const Vec2 p1 = t->frames[i + 1].position;
        const Vec2 d = p1 - p0;
        const double denom = det(d, e);
        if (std::fabs(denom) < 1e-15) continue;  // parallel
        const Vec2 rel = exit_line.a - p0;
        const double u = det(rel, e) / denom;   // along the motion segment
        const double v = det(rel, d) / denom;   // along the exit line
        if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0) {
            return (static_cast<double>(t->frames[i].tick) + u) * traj.dt;
        }
    }
    return std::nullopt;
}

// Polyline arc length of the agent's path.
inline double metric_path_length(const TrajectorySet& traj, AgentId agent) {
    const AgentTrajectory* t = traj.find(agent);
    if (t == nullptr) throw std::invalid_argument("metric_path_length: agent absent");
    if (t->frames.size() < 2) throw std::invalid_argument("metric_path_length: need >= 2 frames");
    double length = 0.0;
    for (size_t i = 0; i + 1 < t->frames.size(); ++i) {
        length += norm(t->frames[i + 1].position - t->frames[i].position);
    }
    return length;
}

// Minimum over ticks and agent pairs of (distance - r_i - r_j). +inf when
// there are fewer than two agents.
inline double metric_min_separation(const TrajectorySet& traj,
                                    const std::map<AgentId, double>& radii) {
    double min_sep = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.agents.size(); ++i) {
        for (size_t j = i + 1; j < traj.agents.size(); ++j) {
            const auto& a = traj.agents[i];
            const auto& b = traj.agents[j];
            const double rr = radii.at(a.id) + radii.at(b.id);
            const size_t n = std::min(a.frames.size(), b.frames.size());
            for (size_t f = 0; f < n; ++f) {
                if (a.frames[f].tick != b.frames[f].tick) {
                    throw std::invalid_argument("metric_min_separation: inconsistent tick axes");
                }
                min_sep = std::min(min_sep,
                                   norm(a.frames[f].position - b.frames[f].position) - rr);
            }
        }
    }
    return min_sep;
}

inline std::map<AgentId, double> radii_of(const Scenario& sc) {
    std::map<AgentId, double> radii;
    for (const auto& a : sc.agents) radii[a.id] = a.params.radius;
    return radii;
}

}  // namespace dominav
