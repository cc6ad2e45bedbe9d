// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dominav/dominance.hpp"
#include "dominav/inference.hpp"
#include "dominav/regression.hpp"
#include "dominav/scenario.hpp"
#include "dominav/social_nav.hpp"
#include "dominav/vehicle.hpp"

namespace dominav {

namespace io_detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::string fmt(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

inline std::map<std::string, std::string> parse_kv(const std::string& body) {
    std::map<std::string, std::string> kv;
    for (const auto& token : split(body, ' ')) {
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw std::runtime_error("expected key=value, got: " + token);
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return kv;
}

}  // namespace io_detail

// ---- trajectory CSV: tick,time,agent_id,x,y,vx,vy ----

inline void write_trajectories(std::ostream& out, const TrajectorySet& traj) {
    out << "tick,time,agent_id,x,y,vx,vy\n";
    size_t max_frames = 0;
    for (const auto& a : traj.agents) max_frames = std::max(max_frames, a.frames.size());
    for (size_t f = 0; f < max_frames; ++f) {
        for (const auto& a : traj.agents) {
            if (f >= a.frames.size()) continue;
            const auto& fr = a.frames[f];
            out << fr.tick << ',' << io_detail::fmt(static_cast<double>(fr.tick) * traj.dt, 3)
                << ',' << a.id << ',' << io_detail::fmt(fr.position.x) << ','
                << io_detail::fmt(fr.position.y) << ',' << io_detail::fmt(fr.velocity.x) << ','
                << io_detail::fmt(fr.velocity.y) << '\n';
        }
    }
}

inline void write_trajectories_file(const std::string& path, const TrajectorySet& traj) {
    auto out = io_detail::open_out(path);
    write_trajectories(out, traj);
}

inline TrajectorySet read_trajectories(std::istream& in) {
    TrajectorySet traj;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory CSV: empty file");
    if (io_detail::trim(line) != "tick,time,agent_id,x,y,vx,vy") {
        throw std::runtime_error("trajectory CSV: unexpected header: " + line);
    }
    std::map<AgentId, size_t> index;
    bool dt_known = false;
    while (std::getline(in, line)) {
        if (io_detail::trim(line).empty()) continue;
        const auto cols = io_detail::split(line, ',');
        if (cols.size() != 7) throw std::runtime_error("trajectory CSV: bad row: " + line);
        const auto tick = static_cast<std::int64_t>(std::stoll(cols[0]));
        const double time = std::stod(cols[1]);
        const auto id = static_cast<AgentId>(std::stol(cols[2]));
        if (!dt_known && tick > 0) {
            traj.dt = time / static_cast<double>(tick);
            dt_known = true;
        }
        auto it = index.find(id);
        if (it == index.end()) {
            index[id] = traj.agents.size();
            traj.agents.push_back({id, {}});
            it = index.find(id);
        }
        traj.agents[it->second].frames.push_back(
            {tick, {std::stod(cols[3]), std::stod(cols[4])},
             {std::stod(cols[5]), std::stod(cols[6])}});
    }
    return traj;
}

inline TrajectorySet read_trajectories_file(const std::string& path) {
    auto in = io_detail::open_in(path);
    return read_trajectories(in);
}

// ---- labeled samples CSV ----

inline const char* kSamplesHeader =
    "neighbor_dist,max_neighbors,planning_horizon,radius,pref_speed,dominance";

inline void write_samples(std::ostream& out, const std::vector<LabeledSample>& samples) {
    out << kSamplesHeader << '\n';
    for (const auto& s : samples) {
        const auto a = s.params.as_array();
        for (double v : a) out << io_detail::fmt(v) << ',';
        out << io_detail::fmt(s.label) << '\n';
    }
}

inline std::vector<LabeledSample> read_samples(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || io_detail::trim(line) != kSamplesHeader) {
        throw std::runtime_error("samples CSV: bad or missing header");
    }
    std::vector<LabeledSample> samples;
    while (std::getline(in, line)) {
        if (io_detail::trim(line).empty()) continue;
        const auto cols = io_detail::split(line, ',');
        if (cols.size() != 6) throw std::runtime_error("samples CSV: bad row: " + line);
        std::array<double, 5> a{};
        for (int k = 0; k < 5; ++k) a[k] = std::stod(cols[static_cast<size_t>(k)]);
        samples.push_back({MotionParams::from_array(a), std::stod(cols[5])});
    }
    return samples;
}

inline std::vector<LabeledSample> read_samples_file(const std::string& path) {
    auto in = io_detail::open_in(path);
    return read_samples(in);
}

// ---- survey CSV: video_id,V_sub,V_with,V_dom,V_conf ----

inline std::vector<std::pair<std::string, SurveyResponse>> read_survey(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || io_detail::trim(line) != "video_id,V_sub,V_with,V_dom,V_conf") {
        throw std::runtime_error("survey CSV: bad or missing header");
    }
    std::vector<std::pair<std::string, SurveyResponse>> rows;
    while (std::getline(in, line)) {
        if (io_detail::trim(line).empty()) continue;
        const auto cols = io_detail::split(line, ',');
        if (cols.size() != 5) throw std::runtime_error("survey CSV: bad row: " + line);
        rows.emplace_back(cols[0], SurveyResponse{std::stod(cols[1]), std::stod(cols[2]),
                                                  std::stod(cols[3]), std::stod(cols[4])});
    }
    return rows;
}

// ---- model file ----

inline void write_model(std::ostream& out, const DominanceModel& model) {
    out << "format: 1\n";
    auto vec = [&](const char* key, const std::array<double, 5>& v) {
        out << key << ':';
        for (double x : v) out << ' ' << io_detail::fmt(x, 10);
        out << '\n';
    };
    vec("coeffs", model.coeffs);
    vec("defaults", model.norm.defaults);
    vec("half_ranges", model.norm.half_ranges);
}

inline void write_model_file(const std::string& path, const DominanceModel& model) {
    auto out = io_detail::open_out(path);
    write_model(out, model);
}

inline DominanceModel read_model(std::istream& in) {
    DominanceModel model;
    std::string line;
    bool format_seen = false;
    while (std::getline(in, line)) {
        line = io_detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw std::runtime_error("model file: bad line: " + line);
        const std::string key = io_detail::trim(line.substr(0, colon));
        const std::string value = io_detail::trim(line.substr(colon + 1));
        if (key == "format") {
            if (value != "1") throw std::runtime_error("model file: unsupported format " + value);
            format_seen = true;
            continue;
        }
        std::array<double, 5> v{};
        std::istringstream vin(value);
        for (int k = 0; k < 5; ++k) {
            if (!(vin >> v[k])) throw std::runtime_error("model file: expected 5 values for " + key);
        }
        if (key == "coeffs") model.coeffs = v;
        else if (key == "defaults") model.norm.defaults = v;
        else if (key == "half_ranges") model.norm.half_ranges = v;
        else throw std::runtime_error("model file: unknown key " + key);
    }
    if (!format_seen) throw std::runtime_error("model file: missing format header");
    return model;
}

inline DominanceModel read_model_file(const std::string& path) {
    auto in = io_detail::open_in(path);
    return read_model(in);
}

// ---- scenario file ----

inline const char* kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::PassThrough: return "pass_through";
        case ScenarioKind::Corridor: return "corridor";
        case ScenarioKind::StandingGroup: return "standing_group";
        case ScenarioKind::NarrowExit: return "narrow_exit";
        case ScenarioKind::Custom: return "custom";
    }
    return "custom";
}

inline std::optional<ScenarioKind> kind_from_name(const std::string& name) {
    if (name == "pass_through") return ScenarioKind::PassThrough;
    if (name == "corridor") return ScenarioKind::Corridor;
    if (name == "standing_group") return ScenarioKind::StandingGroup;
    if (name == "narrow_exit") return ScenarioKind::NarrowExit;
    if (name == "custom") return ScenarioKind::Custom;
    return std::nullopt;
}

inline void write_scenario(std::ostream& out, const Scenario& sc) {
    out << "format: 1\n";
    out << "name: " << sc.name << '\n';
    out << "dt: " << io_detail::fmt(sc.dt, 6) << '\n';
    out << "seed: " << sc.seed << '\n';
    out << "highlighted: " << sc.highlighted << '\n';
    out << "max_ticks: " << sc.max_ticks << '\n';
    out << "termination: "
        << (sc.termination == Termination::AllAtGoal
                ? "all_at_goal"
                : sc.termination == Termination::HighlightedAtGoal ? "highlighted_at_goal"
                                                                   : "max_ticks")
        << '\n';
    for (const auto& o : sc.obstacles) {
        out << "obstacle: " << io_detail::fmt(o.a.x) << ' ' << io_detail::fmt(o.a.y) << ' '
            << io_detail::fmt(o.b.x) << ' ' << io_detail::fmt(o.b.y) << '\n';
    }
    if (sc.exit_line) {
        out << "exit_line: " << io_detail::fmt(sc.exit_line->a.x) << ' '
            << io_detail::fmt(sc.exit_line->a.y) << ' ' << io_detail::fmt(sc.exit_line->b.x) << ' '
            << io_detail::fmt(sc.exit_line->b.y) << '\n';
    }
    for (const auto& a : sc.agents) {
        const char* kind = a.kind == AgentKind::Pedestrian
                               ? "pedestrian"
                               : a.kind == AgentKind::Robot ? "robot" : "standing";
        const auto p = a.params.as_array();
        out << "agent: " << a.id << ' ' << kind << ' ' << io_detail::fmt(a.position.x) << ' '
            << io_detail::fmt(a.position.y) << ' ' << io_detail::fmt(a.goal.x) << ' '
            << io_detail::fmt(a.goal.y);
        for (double v : p) out << ' ' << io_detail::fmt(v);
        out << '\n';
    }
    if (sc.controller) {
        const auto& c = *sc.controller;
        out << "controller: replan_period=" << io_detail::fmt(c.replan_period, 3)
            << " cost_weights=";
        for (int k = 0; k < 5; ++k) out << (k ? "," : "") << io_detail::fmt(c.cost_weights[static_cast<size_t>(k)], 4);
        out << " pedestrian_filter_radius=" << io_detail::fmt(c.pedestrian_filter_radius, 3) << '\n';
    }
    if (sc.vehicle) {
        const auto& v = *sc.vehicle;
        out << "vehicle: v_max=" << io_detail::fmt(v.v_max, 3) << " radius="
            << io_detail::fmt(v.radius, 3) << " c_ped=" << io_detail::fmt(v.c_ped, 4)
            << " s=" << io_detail::fmt(v.s, 4) << " tau_d=" << io_detail::fmt(v.tau_d, 4)
            << " lookahead=" << io_detail::fmt(v.lookahead, 3) << " sign="
            << (v.invert_dominance_sign ? "inverted" : "as_written") << '\n';
        out << "vehicle_path:";
        for (const auto& p : v.path) out << ' ' << io_detail::fmt(p.x) << ' ' << io_detail::fmt(p.y);
        out << '\n';
    }
}

inline void write_scenario_file(const std::string& path, const Scenario& sc) {
    auto out = io_detail::open_out(path);
    write_scenario(out, sc);
}

inline Scenario read_scenario(std::istream& in) {
    Scenario sc;
    sc.kind = ScenarioKind::Custom;
    std::string line;
    bool format_seen = false;
    while (std::getline(in, line)) {
        line = io_detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw std::runtime_error("scenario file: bad line: " + line);
        const std::string key = io_detail::trim(line.substr(0, colon));
        const std::string value = io_detail::trim(line.substr(colon + 1));
        std::istringstream vin(value);
        if (key == "format") {
            if (value != "1") throw std::runtime_error("scenario file: unsupported format " + value);
            format_seen = true;
        } else if (key == "name") {
            sc.name = value;
            if (auto k = kind_from_name(value)) sc.kind = *k;
        } else if (key == "dt") {
            sc.dt = std::stod(value);
        } else if (key == "seed") {
            sc.seed = std::stoull(value);
        } else if (key == "highlighted") {
            sc.highlighted = static_cast<AgentId>(std::stol(value));
        } else if (key == "max_ticks") {
            sc.max_ticks = std::stoll(value);
        } else if (key == "termination") {
            if (value == "all_at_goal") sc.termination = Termination::AllAtGoal;
            else if (value == "highlighted_at_goal") sc.termination = Termination::HighlightedAtGoal;
            else if (value == "max_ticks") sc.termination = Termination::MaxTicks;
            else throw std::runtime_error("scenario file: unknown termination " + value);
        } else if (key == "obstacle") {
            Segment s;
            if (!(vin >> s.a.x >> s.a.y >> s.b.x >> s.b.y)) {
                throw std::runtime_error("scenario file: bad obstacle: " + value);
            }
            sc.obstacles.push_back(s);
        } else if (key == "exit_line") {
            Segment s;
            if (!(vin >> s.a.x >> s.a.y >> s.b.x >> s.b.y)) {
                throw std::runtime_error("scenario file: bad exit_line: " + value);
            }
            sc.exit_line = s;
        } else if (key == "agent") {
            AgentState a;
            std::string kind;
            long id = 0;
            std::array<double, 5> p{};
            if (!(vin >> id >> kind >> a.position.x >> a.position.y >> a.goal.x >> a.goal.y >>
                  p[0] >> p[1] >> p[2] >> p[3] >> p[4])) {
                throw std::runtime_error("scenario file: bad agent: " + value);
            }
            a.id = static_cast<AgentId>(id);
            a.params = MotionParams::from_array(p);
            if (!a.params.in_bounds()) {
                throw std::runtime_error("scenario file: agent params out of bounds: " + value);
            }
            if (kind == "pedestrian") a.kind = AgentKind::Pedestrian;
            else if (kind == "robot") a.kind = AgentKind::Robot;
            else if (kind == "standing") a.kind = AgentKind::Standing;
            else throw std::runtime_error("scenario file: unknown agent kind " + kind);
            sc.agents.push_back(a);
        } else if (key == "controller") {
            RobotControllerConfig c;
            const auto kv = io_detail::parse_kv(value);
            if (auto it = kv.find("replan_period"); it != kv.end()) c.replan_period = std::stod(it->second);
            if (auto it = kv.find("pedestrian_filter_radius"); it != kv.end()) {
                c.pedestrian_filter_radius = std::stod(it->second);
            }
            if (auto it = kv.find("cost_weights"); it != kv.end()) {
                const auto parts = io_detail::split(it->second, ',');
                if (parts.size() != 5) throw std::runtime_error("scenario file: cost_weights needs 5 values");
                for (int k = 0; k < 5; ++k) c.cost_weights[static_cast<size_t>(k)] = std::stod(parts[static_cast<size_t>(k)]);
            }
            sc.controller = c;
        } else if (key == "vehicle") {
            VehicleConfig v = sc.vehicle.value_or(VehicleConfig{});
            const auto kv = io_detail::parse_kv(value);
            if (auto it = kv.find("v_max"); it != kv.end()) v.v_max = std::stod(it->second);
            if (auto it = kv.find("radius"); it != kv.end()) v.radius = std::stod(it->second);
            if (auto it = kv.find("c_ped"); it != kv.end()) v.c_ped = std::stod(it->second);
            if (auto it = kv.find("s"); it != kv.end()) v.s = std::stod(it->second);
            if (auto it = kv.find("tau_d"); it != kv.end()) v.tau_d = std::stod(it->second);
            if (auto it = kv.find("lookahead"); it != kv.end()) v.lookahead = std::stod(it->second);
            if (auto it = kv.find("sign"); it != kv.end()) v.invert_dominance_sign = it->second == "inverted";
            sc.vehicle = v;
        } else if (key == "vehicle_path") {
            VehicleConfig v = sc.vehicle.value_or(VehicleConfig{});
            v.path.clear();
            double x = 0.0, y = 0.0;
            while (vin >> x >> y) v.path.push_back({x, y});
            if (v.path.size() < 2) throw std::runtime_error("scenario file: vehicle_path needs >= 2 points");
            sc.vehicle = v;
        } else {
            throw std::runtime_error("scenario file: unknown key " + key);
        }
    }
    if (!format_seen) throw std::runtime_error("scenario file: missing format header");
    return sc;
}

inline Scenario read_scenario_file(const std::string& path) {
    auto in = io_detail::open_in(path);
    return read_scenario(in);
}

// ---- inference timeline CSV ----

inline void write_timeline(std::ostream& out, const std::vector<TimelineEntry>& timeline,
                           AgentId agent) {
    out << "time,agent_id,neighbor_dist,max_neighbors,planning_horizon,radius,pref_speed,"
           "dominance_raw,dominance_clamped\n";
    for (const auto& e : timeline) {
        const auto p = e.est.params.as_array();
        out << io_detail::fmt(e.time, 3) << ',' << agent;
        for (double v : p) out << ',' << io_detail::fmt(v);
        out << ',' << io_detail::fmt(e.dominance.raw) << ',' << io_detail::fmt(e.dominance.clamped)
            << '\n';
    }
}

// ---- replan log CSV ----

inline void write_replan_log(std::ostream& out, const std::vector<ReplanLogRow>& rows) {
    out << "time,robot_id,d_des,achieved_d,neighbor_dist,max_neighbors,planning_horizon,radius,"
           "pref_speed\n";
    for (const auto& r : rows) {
        const auto p = r.params.as_array();
        out << io_detail::fmt(r.time, 3) << ',' << r.robot << ',' << io_detail::fmt(r.d_des) << ','
            << io_detail::fmt(r.achieved_raw);
        for (double v : p) out << ',' << io_detail::fmt(v);
        out << '\n';
    }
}

// ---- vehicle decision log CSV ----

inline void write_vehicle_log(std::ostream& out, const std::vector<VehicleLogRow>& rows) {
    out << "time,mode,chosen_speed,min_ped_distance,max_ped_dominance\n";
    for (const auto& r : rows) {
        out << io_detail::fmt(r.time, 3) << ','
            << (r.mode == VehicleMode::Proceed ? "proceed" : "yielding") << ','
            << io_detail::fmt(r.chosen_speed) << ',' << io_detail::fmt(r.min_ped_distance) << ','
            << io_detail::fmt(r.max_ped_dominance) << '\n';
    }
}

// ---- run report JSON ----

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::map<std::string, double> metrics;
    bool completed = true;
    std::vector<std::string> artifacts;

    bool operator==(const RunReport&) const = default;
};

inline nlohmann::json to_json(const RunReport& r) {
    return nlohmann::json{{"schema_version", 1},
                          {"scenario", r.scenario},
                          {"seed", r.seed},
                          {"completed", r.completed},
                          {"metrics", r.metrics},
                          {"artifacts", r.artifacts}};
}

inline RunReport report_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != 1) {
        throw std::runtime_error("run report: unsupported schema version");
    }
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.completed = j.at("completed").get<bool>();
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    return r;
}

}  // namespace dominav
