// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dominav/dominance.hpp"
#include "dominav/inference.hpp"
#include "dominav/metrics.hpp"
#include "dominav/regression.hpp"
#include "dominav/scenario.hpp"
#include "dominav/social_nav.hpp"
#include "dominav/vehicle.hpp"

namespace dominav::acceptance {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::map<std::string, double> dominant_overrides() {
    return {{"planning_horizon", 1.0}, {"pref_speed", 2.2}};
}

inline std::map<std::string, double> submissive_overrides() {
    return {{"planning_horizon", 24.0}, {"pref_speed", 1.2}, {"max_neighbors", 40.0}};
}

inline std::vector<LabeledSample> synthetic_samples(int n, std::uint64_t seed, double noise_sigma,
                                                    const DominanceModel& model) {
    std::mt19937_64 rng(seed);
    std::array<std::uniform_real_distribution<double>, 5> dist;
    for (int d = 0; d < 5; ++d) {
        dist[d] = std::uniform_real_distribution<double>(MotionParams::kMin[d],
                                                         MotionParams::kMax[d]);
    }
    std::normal_distribution<double> noise(0.0, noise_sigma);
    std::vector<LabeledSample> samples;
    samples.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::array<double, 5> a{};
        for (int d = 0; d < 5; ++d) a[d] = dist[d](rng);
        const MotionParams p = MotionParams::from_array(a);
        double label = model.raw(normalize(p, model.norm));
        if (noise_sigma > 0.0) label += noise(rng);
        samples.push_back({p, label});
    }
    return samples;
}

inline std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

}  // namespace detail

// 1. Point checks of the dominance map.
inline CriterionResult criterion_point_checks() {
    CriterionResult r{1, "dominance point checks", true, ""};
    const DominanceModel model;
    const double d0 = model.evaluate(MotionParams::defaults()).raw;
    const double d1 = model.evaluate(MotionParams{15, 10, 1, 0.8, 2.2}).raw;
    const double d2 = model.evaluate(MotionParams{3, 40, 24, 0.3, 1.2}).raw;
    r.pass = d0 == 0.0 && std::fabs(d1 - 1.044) <= 1e-9 && std::fabs(d2 - (-0.2020)) <= 1e-4;
    r.detail = "defaults=" + detail::fmt(d0) + " dominant=" + detail::fmt(d1) +
               " submissive=" + detail::fmt(d2);
    return r;
}

// 2. Exact recovery of the coefficients plus a LOOCV noise band.
inline CriterionResult criterion_regression() {
    CriterionResult r{2, "regression fidelity", true, ""};
    const DominanceModel model;

    const auto clean = detail::synthetic_samples(48, 7, 0.0, model);
    const auto fitted = fit(clean, model.norm);
    double max_coeff_err = 0.0;
    for (int k = 0; k < 5; ++k) {
        max_coeff_err = std::max(max_coeff_err, std::fabs(fitted.coeffs[static_cast<size_t>(k)] -
                                                          model.coeffs[static_cast<size_t>(k)]));
    }
    if (max_coeff_err > 1e-9) r.pass = false;

    double worst_low = 1e9, worst_high = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto noisy = detail::synthetic_samples(48, seed, 0.15, model);
        const double mae = loocv(noisy, model.norm);
        worst_low = std::min(worst_low, mae);
        worst_high = std::max(worst_high, mae);
        if (mae < 0.075 || mae > 0.30) r.pass = false;
    }
    r.detail = "coeff_err=" + detail::fmt(max_coeff_err) + " loocv=[" + detail::fmt(worst_low) +
               "," + detail::fmt(worst_high) + "]";
    return r;
}

// 3. Dominant agents clear the narrow exit markedly faster.
inline CriterionResult criterion_exit_time() {
    CriterionResult r{3, "exit-time ordering", true, ""};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Scenario dom = build_scenario(ScenarioKind::NarrowExit,
                                            detail::dominant_overrides(), seed);
        const Scenario sub = build_scenario(ScenarioKind::NarrowExit,
                                            detail::submissive_overrides(), seed);
        const auto dom_run = run_scenario(dom);
        const auto sub_run = run_scenario(sub);
        const auto t_dom = metric_exit_time(dom_run.trajectories, 0, *dom.exit_line);
        const auto t_sub = metric_exit_time(sub_run.trajectories, 0, *sub.exit_line);
        if (!t_dom || !t_sub) {
            r.pass = false;
            r.detail += " seed" + std::to_string(seed) + ":no-exit";
            continue;
        }
        if (*t_dom > 0.7 * *t_sub) r.pass = false;
        r.detail += " seed" + std::to_string(seed) + ":" + detail::fmt(*t_dom) + "/" +
                    detail::fmt(*t_sub);
    }
    return r;
}

// 4. Dominant agents take the more direct path through a standing group.
inline CriterionResult criterion_path_directness() {
    CriterionResult r{4, "path directness", true, ""};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto dom_run =
            run_scenario(build_scenario(ScenarioKind::StandingGroup, detail::dominant_overrides(), seed));
        const auto sub_run =
            run_scenario(build_scenario(ScenarioKind::StandingGroup, detail::submissive_overrides(), seed));
        const double len_dom = metric_path_length(dom_run.trajectories, 0);
        const double len_sub = metric_path_length(sub_run.trajectories, 0);
        if (len_dom > len_sub) r.pass = false;
        if (seed == 1) r.detail = detail::fmt(len_dom) + " vs " + detail::fmt(len_sub);
    }
    return r;
}

// 5. No interpenetration anywhere in the shipped scenarios.
inline CriterionResult criterion_safety() {
    CriterionResult r{5, "safety invariant", true, ""};
    const ScenarioKind kinds[4] = {ScenarioKind::PassThrough, ScenarioKind::Corridor,
                                   ScenarioKind::StandingGroup, ScenarioKind::NarrowExit};
    const std::map<std::string, double> variants[3] = {detail::dominant_overrides(), {},
                                                       detail::submissive_overrides()};
    double worst = std::numeric_limits<double>::infinity();
    for (ScenarioKind kind : kinds) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            for (const auto& overrides : variants) {
                const Scenario sc = build_scenario(kind, overrides, seed);
                const auto run = run_scenario(sc);
                const double sep = metric_min_separation(run.trajectories, radii_of(sc));
                worst = std::min(worst, sep);
                if (sep < -1e-3) r.pass = false;
            }
        }
    }
    r.detail = "min_separation=" + detail::fmt(worst);
    return r;
}

// 6. Closed-loop complementarity in the corridor.
inline CriterionResult criterion_complementarity() {
    CriterionResult r{6, "complementarity closed loop", true, ""};
    const DominanceModel model;

    const double math_check = desired_dominance({0.2, 0.6, 1.0}).d_des;
    if (std::fabs(math_check - 0.4) > 1e-12) r.pass = false;

    // Three pedestrians walk down a corridor in separate lanes, each
    // overtaking slower same-lane traffic at a 1 m/s closing speed (the
    // geometry that makes the planning horizon observable, as in the
    // inference scene). Per pedestrian, the horizon is solved so the true
    // dominance hits the target exactly; the remaining dimensions sit where
    // online estimation is unbiased: radius at the value the filter assumes
    // for neighbors, max_neighbors near the center of the prior, and the
    // horizon targets bracketing the prior center so that residual estimation
    // bias cancels across the three.
    auto with_horizon_solved = [&](double target, double ps) {
        MotionParams p;
        p.neighbor_dist = 30.0;
        p.max_neighbors = 20.0;
        p.radius = 0.8;
        p.pref_speed = ps;
        const auto x = normalize(p, model.norm);
        double partial = 0.0;
        for (size_t k = 0; k < 5; ++k) {
            if (k != 2) partial += model.coeffs[k] * x[k];
        }
        p.planning_horizon =
            model.norm.defaults[2] + (target - partial) / model.coeffs[2] * model.norm.half_ranges[2];
        return p;
    };
    const MotionParams ped_params[3] = {with_horizon_solved(0.2, 1.4), with_horizon_solved(0.6, 1.7),
                                        with_horizon_solved(1.0, 2.2)};
    const double targets[3] = {0.2, 0.6, 1.0};
    for (int i = 0; i < 3; ++i) {
        if (std::fabs(model.evaluate(ped_params[i]).clamped - targets[i]) > 1e-9) r.pass = false;
    }

    Scenario sc;
    sc.kind = ScenarioKind::Custom;
    sc.name = "corridor_robot";
    sc.obstacles.push_back({{-25.0, 8.0}, {400.0, 8.0}});
    sc.obstacles.push_back({{-25.0, -8.0}, {400.0, -8.0}});
    sc.dt = 0.1;
    sc.termination = Termination::HighlightedAtGoal;
    sc.max_ticks = 1200;
    sc.highlighted = 0;

    AgentState robot;
    robot.id = 0;
    robot.position = {-15.0, 6.0};
    robot.goal = {160.0, 6.0};
    robot.kind = AgentKind::Robot;
    sc.agents.push_back(robot);

    const double lanes[3] = {-6.0, -2.0, 2.0};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> jit(-0.15, 0.15);
    AgentId next_id = 1;
    for (int i = 0; i < 3; ++i) {
        AgentState ped;
        ped.id = next_id++;
        ped.position = {-15.0, lanes[i]};
        ped.goal = {500.0, lanes[i]};
        ped.kind = AgentKind::Pedestrian;
        ped.params = ped_params[i];
        sc.agents.push_back(ped);
    }
    for (int i = 0; i < 3; ++i) {
        const double drift = ped_params[i].pref_speed - 1.0;
        for (int w = 0; w < 6; ++w) {
            AgentState a;
            a.id = next_id++;
            a.position = {12.0 + 18.0 * w + 10.0 * jit(rng),
                          lanes[i] + ((w % 2) ? 0.2 : -0.2) + jit(rng)};
            a.goal = {1000.0, a.position.y};
            a.velocity = {drift, 0.0};
            a.externally_driven = true;
            sc.agents.push_back(a);
        }
    }
    sc.controller = RobotControllerConfig{};

    InferenceConfig icfg;
    icfg.model = model;
    icfg.seed = 11;
    icfg.num_particles = 1000;
    icfg.sigma_obs = 0.05;
    const NavigateResult nav = run_navigation(sc, model, icfg);

    if (nav.replan_log.empty()) r.pass = false;
    double worst_gap = 0.0, worst_ddes = 0.0;
    for (const auto& row : nav.replan_log) {
        const double gap = std::fabs(row.achieved_raw - row.d_des);
        worst_gap = std::max(worst_gap, gap);
        worst_ddes = std::max(worst_ddes, std::fabs(row.d_des - 0.4));
        if (gap > 0.05) r.pass = false;
        if (std::fabs(row.d_des - 0.4) > 0.15) r.pass = false;
    }
    r.detail = "replans=" + std::to_string(nav.replan_log.size()) + " max|achieved-d_des|=" +
               detail::fmt(worst_gap) + " max|d_des-0.4|=" + detail::fmt(worst_ddes);
    return r;
}

// 7. The parameter optimizer matches the closed form and a grid oracle.
inline CriterionResult criterion_optimizer() {
    CriterionResult r{7, "optimizer optimality", true, ""};
    const DominanceModel model;
    const SelectResult sel = select_params(model, 0.4, NavCost{});

    double norm_d_sq = 0.0;
    for (double c : model.coeffs) norm_d_sq += c * c;
    double max_err = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double closed = 0.4 * model.coeffs[static_cast<size_t>(k)] / norm_d_sq;
        max_err = std::max(max_err, std::fabs(sel.normalized[static_cast<size_t>(k)] - closed));
    }
    if (max_err > 1e-6) r.pass = false;

    double opt_cost = 0.0;
    for (double x : sel.normalized) opt_cost += x * x;

    // Grid oracle over the normalized box at resolution 0.1.
    const auto lo = social_detail::normalized_box_min(model.norm);
    const auto hi = social_detail::normalized_box_max(model.norm);
    std::array<std::vector<double>, 5> axes;
    for (int k = 0; k < 5; ++k) {
        for (double v = std::ceil(lo[static_cast<size_t>(k)] * 10.0) / 10.0;
             v <= hi[static_cast<size_t>(k)] + 1e-12; v += 0.1) {
            axes[static_cast<size_t>(k)].push_back(v);
        }
    }
    bool beaten = false;
    for (double x0 : axes[0]) {
        for (double x1 : axes[1]) {
            for (double x2 : axes[2]) {
                // Inner two dimensions: bound the residual first for speed.
                const double partial = model.coeffs[0] * x0 + model.coeffs[1] * x1 +
                                       model.coeffs[2] * x2;
                for (double x3 : axes[3]) {
                    for (double x4 : axes[4]) {
                        const double d = partial + model.coeffs[3] * x3 + model.coeffs[4] * x4;
                        if (std::fabs(d - 0.4) > 1e-3) continue;
                        const double cost = x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4;
                        if (cost < opt_cost - 1e-6) beaten = true;
                    }
                }
            }
        }
    }
    if (beaten) r.pass = false;
    r.detail = "closed_form_err=" + detail::fmt(max_err) + " cost=" + detail::fmt(opt_cost) +
               (beaten ? " grid_beats" : " grid_ok");
    return r;
}

namespace detail {

// Overtaking gauntlet: the observed walker repeatedly catches up to slower
// traffic drifting the same way at a 1 m/s closing speed, so each avoidance
// onset happens at time-to-contact = planning_horizon, well inside the
// walker's 30 m sensing range. That makes the horizon observable across its
// whole plausible band instead of being gated by the sensing radius.
inline Scenario inference_scene(const MotionParams& truth, std::uint64_t seed) {
    Scenario sc;
    sc.kind = ScenarioKind::Custom;
    sc.name = "inference_overtake";
    sc.termination = Termination::MaxTicks;
    sc.max_ticks = 1500;
    AgentState target;
    target.id = 0;
    target.position = {-15.0, 0.0};
    target.goal = {500.0, 0.0};
    target.params = truth;
    sc.agents.push_back(target);
    const double drift = truth.pref_speed - 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jit(-0.15, 0.15);
    for (int i = 0; i < 8; ++i) {
        AgentState a;
        a.id = i + 1;
        a.position = {15.0 + 18.0 * i + 10.0 * jit(rng), ((i % 2 == 0) ? 0.2 : -0.2) + jit(rng)};
        a.goal = {1000.0, a.position.y};
        a.velocity = {drift, 0.0};
        a.externally_driven = true;
        sc.agents.push_back(a);
    }
    return sc;
}

// Ground-truth parameters vary the dimensions this scene identifies (horizon,
// radius, preferred speed). Neighbor distance is pinned high so conflicts are
// sensed before the horizon matters; max_neighbors cannot influence a
// single-conflict scene, so it sits at the center of the prior to keep the
// unidentified posterior unbiased.
inline MotionParams inference_truth(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 977);
    MotionParams p;
    p.neighbor_dist = 30.0;
    p.max_neighbors = 20.0;
    std::uniform_real_distribution<double> uph(6.0, 20.0), ur(0.5, 1.5), ups(1.2, 2.2);
    p.planning_horizon = uph(rng);
    p.radius = ur(rng);
    p.pref_speed = ups(rng);
    return p;
}

}  // namespace detail

// 8. Inference recovers the dominance of known synthetic parameters.
inline CriterionResult criterion_inference() {
    CriterionResult r{8, "inference self-consistency", true, ""};
    const DominanceModel model;
    int hits = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MotionParams truth = detail::inference_truth(seed);
        const double d_true = model.evaluate(truth).clamped;
        const auto run = run_scenario(detail::inference_scene(truth, seed));

        InferenceConfig icfg;
        icfg.model = model;
        icfg.seed = seed;
        icfg.num_particles = 1000;
        icfg.sigma_obs = 0.003;  // noiseless synthetic data supports a tight likelihood
        const auto timeline = infer_trajectory(run.trajectories, 0, icfg);
        const double d_est = timeline.back().dominance.clamped;
        const double err = std::fabs(d_est - d_true);
        worst = std::max(worst, err);
        if (err <= 0.15) ++hits;
        r.detail += " s" + std::to_string(seed) + ":" + detail::fmt(err);
    }
    if (hits < 9) r.pass = false;
    r.detail = std::to_string(hits) + "/10 within 0.15;" + r.detail;
    return r;
}

// 9. Vehicle neutrality, threshold decisions and cost monotonicity.
inline CriterionResult criterion_vehicle() {
    CriterionResult r{9, "vehicle neutrality and decisions", true, ""};

    // s = 0 must match a dominance-blind controller bitwise on costs.
    {
        ProximityConfig s_zero{1.0, 0.0, false, false};
        ProximityConfig blind{1.0, 1.0, false, true};
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> upos(-5.0, 5.0), ud(0.0, 1.0);
        for (int i = 0; i < 200; ++i) {
            const Vec2 p{upos(rng), upos(rng)};
            const Vec2 v{upos(rng) * 0.2, upos(rng) * 0.2};
            const double d = ud(rng);
            if (proximity_cost(p, v, s_zero, d) != proximity_cost(p, v, blind, d)) r.pass = false;
        }
    }

    // Threshold rule on a crossing pedestrian.
    {
        VehicleConfig vc;
        vc.path = {{0.0, 0.0}, {20.0, 0.0}};
        VehicleState vehicle;
        vehicle.path = vc.path;
        vehicle.position = {0.0, 0.0};
        VehiclePedestrian crosser{{4.0, -3.0}, {0.0, 1.4}, 0.9, 0.8};
        ProximityConfig cfg{1.0, 1.0, false, false};
        if (yield_decision(vehicle, {crosser}, cfg, vc.tau_d, vc) != YieldDecision::Yield) {
            r.pass = false;
            r.detail += " dominant-crosser-no-yield";
        }
        crosser.dominance = 0.1;
        if (yield_decision(vehicle, {crosser}, cfg, vc.tau_d, vc) != YieldDecision::Proceed) {
            r.pass = false;
            r.detail += " submissive-crosser-yielded";
        }
    }

    // Dominance monotonicity of the proximity cost over a grid.
    {
        ProximityConfig cfg{1.0, 0.7, false, false};
        const Vec2 pv{0.0, 0.0};
        const Vec2 pi{1.5, 0.0};
        double prev = proximity_cost(pi, pv, cfg, 0.0);
        for (int i = 1; i < 100; ++i) {
            const double d = static_cast<double>(i) / 99.0;
            const double c = proximity_cost(pi, pv, cfg, d);
            if (c > prev + 1e-15) {
                r.pass = false;
                r.detail += " non-monotone";
                break;
            }
            prev = c;
        }
    }
    if (r.detail.empty()) r.detail = "neutral, threshold, monotone";
    return r;
}

// 10. Throughput of the simulator and the dominance map.
inline CriterionResult criterion_performance() {
    CriterionResult r{10, "performance", true, ""};
    using clock = std::chrono::steady_clock;

    Scenario sc;
    sc.kind = ScenarioKind::Custom;
    sc.name = "perf";
    sc.termination = Termination::MaxTicks;
    sc.max_ticks = 1000;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 50; ++i) {
        AgentState a;
        a.id = i;
        a.position = {u(rng), u(rng)};
        a.goal = {u(rng), u(rng)};
        sc.agents.push_back(a);
    }
    const auto t0 = clock::now();
    run_scenario(sc);
    const double sim_s = std::chrono::duration<double>(clock::now() - t0).count();
    if (sim_s >= 5.0) r.pass = false;

    const DominanceModel model;
    const auto t1 = clock::now();
    volatile double sink = 0.0;
    constexpr int kEvals = 100000;
    for (int i = 0; i < kEvals; ++i) {
        MotionParams p = MotionParams::defaults();
        p.pref_speed = 1.2 + 0.00001 * i;
        sink = sink + model.evaluate(p).raw;
    }
    const double eval_ms = std::chrono::duration<double, std::milli>(clock::now() - t1).count() /
                           kEvals;
    if (eval_ms >= 1.0) r.pass = false;
    r.detail = "sim_50x1000=" + detail::fmt(sim_s) + "s eval=" + detail::fmt(eval_ms) + "ms";
    return r;
}

inline std::vector<CriterionResult> run_all() {
    return {criterion_point_checks(), criterion_regression(),   criterion_exit_time(),
            criterion_path_directness(), criterion_safety(),    criterion_complementarity(),
            criterion_optimizer(),    criterion_inference(),    criterion_vehicle(),
            criterion_performance()};
}

inline bool report(std::ostream& out, const std::vector<CriterionResult>& results) {
    bool all_pass = true;
    for (const auto& r : results) {
        out << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.index << "  " << r.name << "  ("
            << r.detail << ")\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass;
}

}  // namespace dominav::acceptance
