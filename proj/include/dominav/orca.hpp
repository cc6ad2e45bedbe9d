// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dominav/vec2.hpp"

namespace dominav {

// Static line-segment obstacle, e.g. a wall.
struct Segment {
    Vec2 a;
    Vec2 b;
};

// Velocity-space half-plane constraint; the feasible side is to the left of
// `direction` through `point`.
struct OrcaLine {
    Vec2 point;
    Vec2 direction;
};

// The moving disc whose velocity is being solved for.
struct OrcaAgent {
    Vec2 position;
    Vec2 velocity;
    Vec2 pref_velocity;
    double radius = 0.8;
    double max_speed = 1.75;
    double time_horizon = 24.0;  // for agent-agent constraints
};

// A neighbor as seen by the solver: a disc with a current velocity.
struct OrcaNeighbor {
    Vec2 position;
    Vec2 velocity;
    double radius = 0.8;
};

namespace orca_detail {

constexpr double kEps = 1e-5;

// Obstacle constraints clear walls by the body radius, not the social radius;
// the table's effective radius can exceed half of a passable gap.
constexpr double kObstacleClearanceCap = 0.45;

// One-dimensional LP on the boundary of constraint `line_no`, restricted to
// the disc of the given radius and all earlier constraints.
inline bool linear_program1(const std::vector<OrcaLine>& lines, size_t line_no, double radius,
                            const Vec2& opt_velocity, bool direction_opt, Vec2& result) {
    const OrcaLine& ln = lines[line_no];
    const double dot_product = dot(ln.point, ln.direction);
    const double discriminant = dot_product * dot_product + radius * radius - norm_sq(ln.point);
    if (discriminant < 0.0) return false;  // line misses the disc

    const double sqrt_disc = std::sqrt(discriminant);
    double t_left = -dot_product - sqrt_disc;
    double t_right = -dot_product + sqrt_disc;

    for (size_t i = 0; i < line_no; ++i) {
        const double denominator = det(ln.direction, lines[i].direction);
        const double numerator = det(lines[i].direction, ln.point - lines[i].point);
        if (std::fabs(denominator) <= kEps) {
            if (numerator < 0.0) return false;  // parallel and fully infeasible
            continue;
        }
        const double t = numerator / denominator;
        if (denominator >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) return false;
    }

    if (direction_opt) {
        if (dot(opt_velocity, ln.direction) > 0.0) {
            result = ln.point + t_right * ln.direction;
        } else {
            result = ln.point + t_left * ln.direction;
        }
    } else {
        const double t = dot(ln.direction, opt_velocity - ln.point);
        if (t < t_left) {
            result = ln.point + t_left * ln.direction;
        } else if (t > t_right) {
            result = ln.point + t_right * ln.direction;
        } else {
            result = ln.point + t * ln.direction;
        }
    }
    return true;
}

// Incremental 2D LP over the constraint list; returns lines.size() on
// success, otherwise the index of the first failing constraint.
inline size_t linear_program2(const std::vector<OrcaLine>& lines, double radius,
                              const Vec2& opt_velocity, bool direction_opt, Vec2& result) {
    if (direction_opt) {
        result = opt_velocity * radius;
    } else if (norm_sq(opt_velocity) > radius * radius) {
        result = normalized(opt_velocity) * radius;
    } else {
        result = opt_velocity;
    }
    for (size_t i = 0; i < lines.size(); ++i) {
        if (det(lines[i].direction, lines[i].point - result) > 0.0) {
            const Vec2 temp = result;
            if (!linear_program1(lines, i, radius, opt_velocity, direction_opt, result)) {
                result = temp;
                return i;
            }
        }
    }
    return lines.size();
}

// Infeasible fallback: minimize the maximum violation of the agent
// constraints while keeping obstacle constraints hard.
inline void linear_program3(const std::vector<OrcaLine>& lines, size_t num_obst_lines,
                            size_t begin_line, double radius, Vec2& result) {
    double distance = 0.0;
    for (size_t i = begin_line; i < lines.size(); ++i) {
        if (det(lines[i].direction, lines[i].point - result) <= distance) continue;

        std::vector<OrcaLine> proj_lines(lines.begin(),
                                         lines.begin() + static_cast<long>(num_obst_lines));
        for (size_t j = num_obst_lines; j < i; ++j) {
            OrcaLine line;
            const double determinant = det(lines[i].direction, lines[j].direction);
            if (std::fabs(determinant) <= kEps) {
                if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
                line.point = 0.5 * (lines[i].point + lines[j].point);
            } else {
                line.point = lines[i].point +
                             (det(lines[j].direction, lines[i].point - lines[j].point) /
                              determinant) *
                                 lines[i].direction;
            }
            line.direction = normalized(lines[j].direction - lines[i].direction);
            proj_lines.push_back(line);
        }

        const Vec2 temp = result;
        if (linear_program2(proj_lines, radius, perp(lines[i].direction), true, result) <
            proj_lines.size()) {
            result = temp;
        }
        distance = det(lines[i].direction, lines[i].point - result);
    }
}

// Directed obstacle edge with cyclic links, mirroring a polygonal chain. A
// standalone wall segment becomes the 2-cycle a->b, b->a with both endpoints
// convex.
struct ObstacleEdge {
    Vec2 point;
    Vec2 unit_dir;
    int next = 0;
    int prev = 0;
};

inline std::vector<ObstacleEdge> build_edges(std::span<const Segment> obstacles) {
    std::vector<ObstacleEdge> edges;
    edges.reserve(obstacles.size() * 2);
    for (const Segment& seg : obstacles) {
        if (norm_sq(seg.b - seg.a) < 1e-12) continue;  // degenerate segment
        const int i = static_cast<int>(edges.size());
        edges.push_back({seg.a, normalized(seg.b - seg.a), i + 1, i + 1});
        edges.push_back({seg.b, normalized(seg.a - seg.b), i, i});
    }
    return edges;
}

inline void add_obstacle_lines(const OrcaAgent& agent, std::span<const Segment> obstacles,
                               double time_horizon_obst, std::vector<OrcaLine>& orca_lines) {
    const double inv_th = 1.0 / time_horizon_obst;
    const double radius = std::min(agent.radius, kObstacleClearanceCap);
    const double radius_sq = radius * radius;
    const auto edges = build_edges(obstacles);

    for (size_t e = 0; e < edges.size(); ++e) {
        size_t i1 = e;
        size_t i2 = static_cast<size_t>(edges[e].next);
        const ObstacleEdge* obstacle1 = &edges[i1];
        const ObstacleEdge* obstacle2 = &edges[i2];

        // Each wall is a 2-cycle of directed edges; only the edge that has
        // the agent on its right faces the agent. The reversed edge would
        // build a mirror-image velocity obstacle whose cutoff constraint
        // points the feasible side into the wall.
        if (det(obstacle1->unit_dir, agent.position - obstacle1->point) > 0.0) continue;

        const Vec2 relative_position1 = obstacle1->point - agent.position;
        const Vec2 relative_position2 = obstacle2->point - agent.position;

        // Skip when the velocity obstacle is already covered by a previous line.
        bool already_covered = false;
        for (const OrcaLine& line : orca_lines) {
            if (det(inv_th * relative_position1 - line.point, line.direction) -
                        inv_th * radius >= -kEps &&
                det(inv_th * relative_position2 - line.point, line.direction) -
                        inv_th * radius >= -kEps) {
                already_covered = true;
                break;
            }
        }
        if (already_covered) continue;

        const double dist_sq1 = norm_sq(relative_position1);
        const double dist_sq2 = norm_sq(relative_position2);
        const Vec2 obstacle_vector = obstacle2->point - obstacle1->point;
        const double s = dot(-relative_position1, obstacle_vector) / norm_sq(obstacle_vector);
        const double dist_sq_line = norm_sq(-relative_position1 - s * obstacle_vector);

        OrcaLine line;
        if (s < 0.0 && dist_sq1 <= radius_sq) {
            // Collision with the left endpoint.
            line.point = {0.0, 0.0};
            line.direction = normalized(Vec2{-relative_position1.y, relative_position1.x});
            orca_lines.push_back(line);
            continue;
        }
        if (s > 1.0 && dist_sq2 <= radius_sq) {
            // Collision with the right endpoint; covered by the neighboring
            // edge when the agent is to its left.
            if (det(relative_position2, obstacle2->unit_dir) >= 0.0) {
                line.point = {0.0, 0.0};
                line.direction = normalized(Vec2{-relative_position2.y, relative_position2.x});
                orca_lines.push_back(line);
            }
            continue;
        }
        if (s >= 0.0 && s <= 1.0 && dist_sq_line <= radius_sq) {
            // Collision with the interior of the segment.
            line.point = {0.0, 0.0};
            line.direction = -obstacle1->unit_dir;
            orca_lines.push_back(line);
            continue;
        }

        Vec2 left_leg_direction, right_leg_direction;
        if (s < 0.0 && dist_sq_line <= radius_sq) {
            // Oblique view from the left endpoint; both legs hang off it.
            i2 = i1;
            obstacle2 = obstacle1;
            const double leg1 = std::sqrt(dist_sq1 - radius_sq);
            left_leg_direction = Vec2{relative_position1.x * leg1 - relative_position1.y * radius,
                                      relative_position1.x * radius + relative_position1.y * leg1} /
                                 dist_sq1;
            right_leg_direction = Vec2{relative_position1.x * leg1 + relative_position1.y * radius,
                                       -relative_position1.x * radius + relative_position1.y * leg1} /
                                  dist_sq1;
        } else if (s > 1.0 && dist_sq_line <= radius_sq) {
            i1 = i2;
            obstacle1 = obstacle2;
            const double leg2 = std::sqrt(dist_sq2 - radius_sq);
            left_leg_direction = Vec2{relative_position2.x * leg2 - relative_position2.y * radius,
                                      relative_position2.x * radius + relative_position2.y * leg2} /
                                 dist_sq2;
            right_leg_direction = Vec2{relative_position2.x * leg2 + relative_position2.y * radius,
                                       -relative_position2.x * radius + relative_position2.y * leg2} /
                                  dist_sq2;
        } else {
            const double leg1 = std::sqrt(dist_sq1 - radius_sq);
            left_leg_direction = Vec2{relative_position1.x * leg1 - relative_position1.y * radius,
                                      relative_position1.x * radius + relative_position1.y * leg1} /
                                 dist_sq1;
            const double leg2 = std::sqrt(dist_sq2 - radius_sq);
            right_leg_direction = Vec2{relative_position2.x * leg2 + relative_position2.y * radius,
                                       -relative_position2.x * radius + relative_position2.y * leg2} /
                                  dist_sq2;
        }

        // Legs must not cut into the neighboring edges of the chain.
        const ObstacleEdge* left_neighbor = &edges[static_cast<size_t>(edges[i1].prev)];
        bool left_leg_foreign = false;
        bool right_leg_foreign = false;
        if (det(left_leg_direction, -left_neighbor->unit_dir) >= 0.0) {
            left_leg_direction = -left_neighbor->unit_dir;
            left_leg_foreign = true;
        }
        if (det(right_leg_direction, obstacle2->unit_dir) <= 0.0) {
            right_leg_direction = obstacle2->unit_dir;
            right_leg_foreign = true;
        }

        const Vec2 left_cutoff = inv_th * (obstacle1->point - agent.position);
        const Vec2 right_cutoff = inv_th * (obstacle2->point - agent.position);
        const Vec2 cutoff_vec = right_cutoff - left_cutoff;

        const double t = (obstacle1 == obstacle2)
                             ? 0.5
                             : dot(agent.velocity - left_cutoff, cutoff_vec) / norm_sq(cutoff_vec);
        const double t_left = dot(agent.velocity - left_cutoff, left_leg_direction);
        const double t_right = dot(agent.velocity - right_cutoff, right_leg_direction);

        if ((t < 0.0 && t_left < 0.0) ||
            (obstacle1 == obstacle2 && t_left < 0.0 && t_right < 0.0)) {
            // Project on the left cutoff circle.
            const Vec2 unit_w = normalized(agent.velocity - left_cutoff);
            line.direction = {unit_w.y, -unit_w.x};
            line.point = left_cutoff + radius * inv_th * unit_w;
            orca_lines.push_back(line);
            continue;
        }
        if (t > 1.0 && t_right < 0.0) {
            const Vec2 unit_w = normalized(agent.velocity - right_cutoff);
            line.direction = {unit_w.y, -unit_w.x};
            line.point = right_cutoff + radius * inv_th * unit_w;
            orca_lines.push_back(line);
            continue;
        }

        constexpr double inf = std::numeric_limits<double>::infinity();
        const double dist_sq_cutoff =
            (t < 0.0 || t > 1.0 || obstacle1 == obstacle2)
                ? inf
                : norm_sq(agent.velocity - (left_cutoff + t * cutoff_vec));
        const double dist_sq_left =
            t_left < 0.0 ? inf
                         : norm_sq(agent.velocity - (left_cutoff + t_left * left_leg_direction));
        const double dist_sq_right =
            t_right < 0.0
                ? inf
                : norm_sq(agent.velocity - (right_cutoff + t_right * right_leg_direction));

        if (dist_sq_cutoff <= dist_sq_left && dist_sq_cutoff <= dist_sq_right) {
            line.direction = -obstacle1->unit_dir;
            line.point = left_cutoff + radius * inv_th * perp(line.direction);
            orca_lines.push_back(line);
        } else if (dist_sq_left <= dist_sq_right) {
            if (left_leg_foreign) continue;
            line.direction = left_leg_direction;
            line.point = left_cutoff + radius * inv_th * perp(line.direction);
            orca_lines.push_back(line);
        } else {
            if (right_leg_foreign) continue;
            line.direction = -right_leg_direction;
            line.point = right_cutoff + radius * inv_th * perp(line.direction);
            orca_lines.push_back(line);
        }
    }
}

inline void add_agent_lines(const OrcaAgent& agent, std::span<const OrcaNeighbor> neighbors,
                            double dt, std::vector<OrcaLine>& orca_lines) {
    const double inv_time_horizon = 1.0 / agent.time_horizon;
    for (const OrcaNeighbor& other : neighbors) {
        const Vec2 relative_position = other.position - agent.position;
        const Vec2 relative_velocity = agent.velocity - other.velocity;
        const double dist_sq = norm_sq(relative_position);
        const double combined_radius = agent.radius + other.radius;
        const double combined_radius_sq = combined_radius * combined_radius;

        OrcaLine line;
        Vec2 u;
        if (dist_sq > combined_radius_sq) {
            const Vec2 w = relative_velocity - inv_time_horizon * relative_position;
            const double w_length_sq = norm_sq(w);
            const double dot_product1 = dot(w, relative_position);
            if (dot_product1 < 0.0 &&
                dot_product1 * dot_product1 > combined_radius_sq * w_length_sq) {
                // Project on the cutoff circle.
                const double w_length = std::sqrt(w_length_sq);
                const Vec2 unit_w = w / w_length;
                line.direction = {unit_w.y, -unit_w.x};
                u = (combined_radius * inv_time_horizon - w_length) * unit_w;
            } else {
                // Project on a cone leg; det == 0 (exact head-on) falls
                // through to the right leg, which fixes the tie-break.
                const double leg = std::sqrt(dist_sq - combined_radius_sq);
                if (det(relative_position, w) > 0.0) {
                    line.direction =
                        Vec2{relative_position.x * leg - relative_position.y * combined_radius,
                             relative_position.x * combined_radius + relative_position.y * leg} /
                        dist_sq;
                } else {
                    line.direction =
                        -Vec2{relative_position.x * leg + relative_position.y * combined_radius,
                              -relative_position.x * combined_radius + relative_position.y * leg} /
                        dist_sq;
                }
                u = dot(relative_velocity, line.direction) * line.direction - relative_velocity;
            }
        } else {
            // Already colliding: push apart within one timestep.
            const double inv_time_step = 1.0 / dt;
            const Vec2 w = relative_velocity - inv_time_step * relative_position;
            const double w_length = norm(w);
            const Vec2 unit_w = w_length > 0.0 ? w / w_length : normalized(-relative_position);
            line.direction = {unit_w.y, -unit_w.x};
            u = (combined_radius * inv_time_step - w_length) * unit_w;
        }
        // Reciprocity: each agent takes half of the avoidance effort.
        line.point = agent.velocity + 0.5 * u;
        orca_lines.push_back(line);
    }
}

}  // namespace orca_detail

// Result of one velocity solve; `feasible` is false when the violation-
// minimizing fallback was used.
struct OrcaResult {
    Vec2 velocity;
    bool feasible = true;
    std::vector<OrcaLine> lines;
};

// Computes the velocity closest to the agent's preferred velocity that
// satisfies all reciprocal half-plane constraints, capped at max_speed.
// Constraint order is obstacles first, then neighbors in the given order,
// which also fixes the deterministic tie-break.
inline OrcaResult solve_orca(const OrcaAgent& agent, std::span<const OrcaNeighbor> neighbors,
                             std::span<const Segment> obstacles, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("solve_orca: dt must be positive");
    if (!is_finite(agent.position) || !is_finite(agent.velocity) ||
        !is_finite(agent.pref_velocity)) {
        throw std::invalid_argument("solve_orca: non-finite agent state");
    }
    for (const auto& n : neighbors) {
        if (!is_finite(n.position) || !is_finite(n.velocity) || n.radius <= 0.0) {
            throw std::invalid_argument("solve_orca: invalid neighbor");
        }
    }
    if (agent.radius <= 0.0) throw std::invalid_argument("solve_orca: radius must be positive");

    OrcaResult res;
    orca_detail::add_obstacle_lines(agent, obstacles, dt * 10.0, res.lines);
    const size_t num_obst_lines = res.lines.size();
    orca_detail::add_agent_lines(agent, neighbors, dt, res.lines);

    const size_t line_fail = orca_detail::linear_program2(res.lines, agent.max_speed,
                                                          agent.pref_velocity, false, res.velocity);
    if (line_fail < res.lines.size()) {
        res.feasible = false;
        orca_detail::linear_program3(res.lines, num_obst_lines, line_fail, agent.max_speed,
                                     res.velocity);
    }
    return res;
}

}  // namespace dominav
