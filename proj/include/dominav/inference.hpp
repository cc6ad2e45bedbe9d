// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "dominav/dominance.hpp"
#include "dominav/scenario.hpp"
#include "dominav/world.hpp"

namespace dominav {

// Positions of all visible agents at one instant.
struct ObservationFrame {
    double time = 0.0;
    std::map<AgentId, Vec2> positions;
    AgentId target = 0;
};

struct Hypothesis {
    MotionParams params;
    double weight = 0.0;
};

// Weighted hypotheses over one pedestrian's motion parameters.
struct ParticleSet {
    std::vector<Hypothesis> hypotheses;
    double sigma_obs = 0.1;
    std::uint64_t rng_seed = 0;
    std::mt19937_64 rng;
    std::optional<Vec2> prev_target_pos;        // for the target's current velocity
    std::map<AgentId, Vec2> prev_positions;     // for the neighbors' current velocities
    // Slow moving average of the observed velocity. Preferred velocity is
    // taken along this base course rather than the instantaneous heading, so
    // a brief avoidance arc does not read as a change of intent.
    std::optional<Vec2> smoothed_vel;
    int resets = 0;  // posterior-reset events after weight underflow

    double ess() const {
        double sum_sq = 0.0;
        for (const auto& h : hypotheses) sum_sq += h.weight * h.weight;
        return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
    }
};

struct InferenceConfig {
    int num_particles = 200;
    std::uint64_t seed = 1;
    double sigma_obs = 0.1;
    DominanceModel model;
    std::vector<Segment> obstacles;  // known static environment
};

namespace inference_detail {

inline std::vector<Hypothesis> sample_prior(int k, std::mt19937_64& rng) {
    std::vector<Hypothesis> hs;
    hs.reserve(static_cast<size_t>(k));
    std::array<std::uniform_real_distribution<double>, 5> dist;
    for (int d = 0; d < 5; ++d) {
        dist[d] = std::uniform_real_distribution<double>(MotionParams::kMin[d],
                                                         MotionParams::kMax[d]);
    }
    for (int i = 0; i < k; ++i) {
        std::array<double, 5> a{};
        for (int d = 0; d < 5; ++d) a[d] = dist[d](rng);
        hs.push_back({MotionParams::from_array(a), 1.0 / k});
    }
    return hs;
}

// One-step forward prediction of the target under hypothesis params, with
// every other agent treated as a passive disc moving at its observed
// velocity. The target's goal is unknown, so the preferred velocity points
// along its current heading at the hypothesized preferred speed.
inline Vec2 predict_next(const MotionParams& params, const Vec2& target_pos,
                         const Vec2& target_vel, const Vec2& base_course,
                         const std::vector<OrcaNeighbor>& all_neighbors,
                         std::span<const Segment> obstacles, double dt) {
    Vec2 pref{0.0, 0.0};
    const double speed = norm(base_course);
    if (speed > 0.05) pref = (base_course / speed) * params.pref_speed;

    // Neighbor selection under the hypothesis's own range and cap.
    std::vector<std::pair<double, size_t>> order;
    const double max_d2 = params.neighbor_dist * params.neighbor_dist;
    for (size_t i = 0; i < all_neighbors.size(); ++i) {
        const double d2 = norm_sq(all_neighbors[i].position - target_pos);
        if (d2 <= max_d2) order.emplace_back(d2, i);
    }
    std::sort(order.begin(), order.end());
    const auto cap = static_cast<size_t>(std::max(0.0, std::round(params.max_neighbors)));
    if (order.size() > cap) order.resize(cap);

    std::vector<OrcaNeighbor> selected;
    selected.reserve(order.size());
    for (const auto& [d2, i] : order) selected.push_back(all_neighbors[i]);

    OrcaAgent self{target_pos, target_vel, pref, params.radius, params.max_speed(),
                   params.planning_horizon};
    const Vec2 v = solve_orca(self, selected, obstacles, dt).velocity;
    return target_pos + v * dt;
}

}  // namespace inference_detail

// Uniform prior over the parameter box.
inline ParticleSet init_posterior(int k, std::uint64_t seed, double sigma_obs) {
    if (k < 2) throw std::invalid_argument("init_posterior: need at least 2 hypotheses");
    if (sigma_obs <= 0.0) throw std::invalid_argument("init_posterior: sigma_obs must be positive");
    ParticleSet ps;
    ps.sigma_obs = sigma_obs;
    ps.rng_seed = seed;
    ps.rng.seed(seed);
    ps.hypotheses = inference_detail::sample_prior(k, ps.rng);
    return ps;
}

// One Bayes update from a pair of consecutive frames. `course_hint`, when
// given, overrides the estimated base course with a known direction of
// travel (e.g. the whole-trajectory displacement in offline inference).
inline void update(ParticleSet& ps, const ObservationFrame& frame_t,
                   const ObservationFrame& frame_next, double dt,
                   std::span<const Segment> obstacles = {},
                   const std::optional<Vec2>& course_hint = std::nullopt) {
    if (dt <= 0.0) throw std::invalid_argument("update: dt must be positive");
    const auto it_t = frame_t.positions.find(frame_t.target);
    const auto it_next = frame_next.positions.find(frame_t.target);
    if (it_t == frame_t.positions.end() || it_next == frame_next.positions.end()) {
        throw std::invalid_argument("update: target missing from a frame");
    }
    const Vec2 target_pos = it_t->second;
    const Vec2 observed_next = it_next->second;
    const Vec2 target_vel =
        ps.prev_target_pos ? (target_pos - *ps.prev_target_pos) / dt : Vec2{0.0, 0.0};
    constexpr double kCourseTau = 2.0;  // s
    if (ps.prev_target_pos) {
        if (!ps.smoothed_vel) {
            ps.smoothed_vel = target_vel;
        } else {
            const double alpha = std::min(1.0, dt / kCourseTau);
            *ps.smoothed_vel = *ps.smoothed_vel * (1.0 - alpha) + target_vel * alpha;
        }
    }
    const Vec2 base_course = course_hint.value_or(ps.smoothed_vel.value_or(target_vel));

    // Passive neighbors with finite-difference velocities. The simulator is
    // synchronous: the velocity entering an agent's constraints at time t is
    // the one that produced the step into t, so difference backwards when a
    // previous frame exists and forwards only on the first frame.
    std::vector<OrcaNeighbor> neighbors;
    for (const auto& [id, pos] : frame_t.positions) {
        if (id == frame_t.target) continue;
        Vec2 vel{0.0, 0.0};
        if (auto pv = ps.prev_positions.find(id); pv != ps.prev_positions.end()) {
            vel = (pos - pv->second) / dt;
        } else if (auto nx = frame_next.positions.find(id); nx != frame_next.positions.end()) {
            vel = (nx->second - pos) / dt;
        }
        neighbors.push_back({pos, vel, MotionParams::defaults().radius});
    }

    const double inv_two_sigma_sq = 1.0 / (2.0 * ps.sigma_obs * ps.sigma_obs);
    double sum = 0.0;
    for (auto& h : ps.hypotheses) {
        const Vec2 predicted = inference_detail::predict_next(
            h.params, target_pos, target_vel, base_course, neighbors, obstacles, dt);
        const double err_sq = norm_sq(predicted - observed_next);
        h.weight *= std::exp(-err_sq * inv_two_sigma_sq);
        sum += h.weight;
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        // Every hypothesis contradicts the observation hard enough that its
        // weight underflows. Restart from the prior rather than carrying a
        // numerically dead posterior; later evidence re-localizes it.
        ps.hypotheses = inference_detail::sample_prior(static_cast<int>(ps.hypotheses.size()), ps.rng);
        ++ps.resets;
        ps.prev_target_pos = target_pos;
        ps.prev_positions = frame_t.positions;
        return;
    }
    for (auto& h : ps.hypotheses) h.weight /= sum;

    const auto k = ps.hypotheses.size();
    if (ps.ess() < static_cast<double>(k) / 2.0) {
        // Systematic resampling followed by jitter inside the box.
        std::vector<Hypothesis> resampled;
        resampled.reserve(k);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double start = u01(ps.rng) / static_cast<double>(k);
        double cumulative = ps.hypotheses[0].weight;
        size_t idx = 0;
        for (size_t i = 0; i < k; ++i) {
            const double u = start + static_cast<double>(i) / static_cast<double>(k);
            while (u > cumulative && idx + 1 < k) cumulative += ps.hypotheses[++idx].weight;
            resampled.push_back({ps.hypotheses[idx].params, 1.0 / static_cast<double>(k)});
        }
        const NormalizationSpec norm{};
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& h : resampled) {
            auto a = h.params.as_array();
            for (int d = 0; d < 5; ++d) {
                a[d] += gauss(ps.rng) * 0.02 * norm.half_ranges[static_cast<size_t>(d)];
                a[d] = std::min(MotionParams::kMax[d], std::max(MotionParams::kMin[d], a[d]));
            }
            h.params = MotionParams::from_array(a);
        }
        ps.hypotheses = std::move(resampled);
    }
    ps.prev_target_pos = target_pos;
    ps.prev_positions = frame_t.positions;
}

struct Estimate {
    MotionParams params;          // weighted mean, rounded/clipped
    std::array<double, 5> stddev{};  // weighted per-dimension std
};

inline Estimate estimate(const ParticleSet& ps) {
    std::array<double, 5> mean{};
    for (const auto& h : ps.hypotheses) {
        const auto a = h.params.as_array();
        for (int d = 0; d < 5; ++d) mean[d] += h.weight * a[d];
    }
    std::array<double, 5> var{};
    for (const auto& h : ps.hypotheses) {
        const auto a = h.params.as_array();
        for (int d = 0; d < 5; ++d) var[d] += h.weight * (a[d] - mean[d]) * (a[d] - mean[d]);
    }
    Estimate e;
    e.params = MotionParams::from_array(mean).clamped();
    for (int d = 0; d < 5; ++d) e.stddev[d] = std::sqrt(std::max(0.0, var[d]));
    return e;
}

struct TimelineEntry {
    double time = 0.0;
    Estimate est;
    DominanceScore dominance;
};

// Sequential inference over a recorded trajectory set, one estimate per
// processed frame pair.
inline std::vector<TimelineEntry> infer_trajectory(const TrajectorySet& traj, AgentId target,
                                                   const InferenceConfig& config) {
    const AgentTrajectory* t = traj.find(target);
    if (t == nullptr || t->frames.size() < 3) {
        throw std::invalid_argument("infer_trajectory: target needs at least 3 frames");
    }

    const size_t n_frames = t->frames.size();
    auto frame_at = [&](size_t f) {
        ObservationFrame frame;
        frame.target = target;
        frame.time = static_cast<double>(t->frames[f].tick) * traj.dt;
        for (const auto& a : traj.agents) {
            if (f < a.frames.size()) frame.positions[a.id] = a.frames[f].position;
        }
        return frame;
    };

    ParticleSet ps = init_posterior(config.num_particles, config.seed, config.sigma_obs);
    std::vector<TimelineEntry> timeline;
    timeline.reserve(n_frames - 1);

    // Offline runs know the whole path; its overall displacement is a far
    // steadier base course than any instantaneous heading. A shared course
    // error shifts every hypothesis's prediction alike and cancels in the
    // weight normalization.
    std::optional<Vec2> course;
    const Vec2 total_disp = t->frames.back().position - t->frames.front().position;
    const double duration =
        static_cast<double>(t->frames.back().tick - t->frames.front().tick) * traj.dt;
    if (duration > 0.0 && norm(total_disp) / duration > 0.2) course = total_disp;

    ObservationFrame current = frame_at(0);
    for (size_t f = 0; f + 1 < n_frames; ++f) {
        ObservationFrame next = frame_at(f + 1);
        update(ps, current, next, traj.dt, config.obstacles, course);
        TimelineEntry entry;
        entry.time = next.time;
        entry.est = estimate(ps);
        entry.dominance = config.model.evaluate(entry.est.params);
        timeline.push_back(entry);
        current = std::move(next);
    }
    return timeline;
}

}  // namespace dominav
