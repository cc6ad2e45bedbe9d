// SPDX-License-Identifier: Apache-2.0
//
// dominav: crowd simulation with dominance-aware navigation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dominav/acceptance.hpp"
#include "dominav/io.hpp"

namespace {

using namespace dominav;

Scenario load_scenario(const std::string& spec, std::uint64_t seed) {
    if (auto kind = kind_from_name(spec)) {
        if (*kind == ScenarioKind::Custom) {
            throw std::runtime_error("custom scenarios need a scenario file");
        }
        return build_scenario(*kind, {}, seed);
    }
    Scenario sc = read_scenario_file(spec);
    if (seed != 0) sc.seed = seed;
    return sc;
}

MotionParams parse_params(const std::string& csv) {
    const auto parts = io_detail::split(csv, ',');
    if (parts.size() != 5) throw std::runtime_error("--params needs 5 comma-separated values");
    std::array<double, 5> a{};
    for (int k = 0; k < 5; ++k) a[static_cast<size_t>(k)] = std::stod(parts[static_cast<size_t>(k)]);
    return MotionParams::from_array(a);
}

int cmd_simulate(const std::string& scenario_spec, std::uint64_t seed, const std::string& out_dir) {
    const Scenario sc = load_scenario(scenario_spec, seed);
    const RunResult run = run_scenario(sc);

    std::filesystem::create_directories(out_dir);
    const std::string traj_path = out_dir + "/trajectories.csv";
    write_trajectories_file(traj_path, run.trajectories);

    RunReport report;
    report.scenario = sc.name;
    report.seed = sc.seed;
    report.completed = run.completed;
    report.metrics["ticks"] = static_cast<double>(run.ticks);
    report.metrics["path_length_highlighted"] = metric_path_length(run.trajectories, sc.highlighted);
    const double min_sep = metric_min_separation(run.trajectories, radii_of(sc));
    if (std::isfinite(min_sep)) report.metrics["min_separation"] = min_sep;
    if (sc.exit_line) {
        if (auto t = metric_exit_time(run.trajectories, sc.highlighted, *sc.exit_line)) {
            report.metrics["exit_time"] = *t;
        }
    }
    report.artifacts.push_back(traj_path);

    const std::string report_path = out_dir + "/report.json";
    auto out = io_detail::open_out(report_path);
    out << to_json(report).dump(2) << '\n';
    std::cout << "wrote " << traj_path << " and " << report_path << '\n';
    return 0;
}

int cmd_dominance(const std::string& params_csv) {
    const DominanceModel model;
    const MotionParams p = parse_params(params_csv);
    const DominanceScore d = model.evaluate(p);
    std::cout << "raw " << io_detail::fmt(d.raw) << "\nclamped " << io_detail::fmt(d.clamped)
              << '\n';
    return 0;
}

int cmd_fit(const std::string& samples_path, const std::string& out_path) {
    const auto samples = read_samples_file(samples_path);
    const DominanceModel model = fit(samples, NormalizationSpec{});
    write_model_file(out_path, model);
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

int cmd_loocv(const std::string& samples_path) {
    const auto samples = read_samples_file(samples_path);
    std::cout << "loocv_mae " << io_detail::fmt(loocv(samples, NormalizationSpec{})) << '\n';
    return 0;
}

int cmd_infer(const std::string& traj_path, int agent, std::uint64_t seed,
              const std::string& out_path) {
    const TrajectorySet traj = read_trajectories_file(traj_path);
    InferenceConfig cfg;
    cfg.seed = seed;
    const auto timeline = infer_trajectory(traj, agent, cfg);
    if (out_path.empty()) {
        write_timeline(std::cout, timeline, agent);
    } else {
        auto out = io_detail::open_out(out_path);
        write_timeline(out, timeline, agent);
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int cmd_navigate(const std::string& scenario_spec, std::uint64_t seed, const std::string& out_dir) {
    Scenario sc = load_scenario(scenario_spec, seed);
    const DominanceModel model;
    InferenceConfig icfg;
    icfg.model = model;
    icfg.seed = sc.seed == 0 ? 1 : sc.seed;
    const NavigateResult nav = run_navigation(sc, model, icfg);

    std::filesystem::create_directories(out_dir);
    const std::string traj_path = out_dir + "/trajectories.csv";
    write_trajectories_file(traj_path, nav.run.trajectories);
    const std::string log_path = out_dir + "/replan_log.csv";
    {
        auto out = io_detail::open_out(log_path);
        write_replan_log(out, nav.replan_log);
    }
    std::cout << "wrote " << traj_path << " and " << log_path << '\n';
    return 0;
}

int cmd_vehicle(const std::string& scenario_spec, std::uint64_t seed, const std::string& out_dir) {
    Scenario sc = load_scenario(scenario_spec, seed);
    const DominanceModel model;
    const VehicleRunResult run = run_vehicle(sc, model);

    std::filesystem::create_directories(out_dir);
    const std::string traj_path = out_dir + "/trajectories.csv";
    write_trajectories_file(traj_path, run.trajectories);
    const std::string log_path = out_dir + "/decision_log.csv";
    {
        auto out = io_detail::open_out(log_path);
        write_vehicle_log(out, run.log);
    }
    std::cout << "wrote " << traj_path << " and " << log_path << '\n';
    std::cout << "min_vehicle_ped_separation "
              << io_detail::fmt(run.min_vehicle_ped_separation) << '\n';
    return 0;
}

int cmd_bench() {
    const auto results = acceptance::run_all();
    return acceptance::report(std::cout, results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dominav: dominance-aware crowd simulation and navigation"};
    app.require_subcommand(1);

    std::string scenario_spec, params_csv, samples_path, traj_path;
    std::string out_dir = "out", out_path, model_out = "model.txt";
    std::uint64_t seed = 0;
    int agent = 0;

    auto* simulate = app.add_subcommand("simulate", "run a scenario and write trajectories");
    simulate->add_option("--scenario", scenario_spec, "scenario file or builtin name")->required();
    simulate->add_option("--seed", seed, "run seed");
    simulate->add_option("--out", out_dir, "output directory");

    auto* dominance = app.add_subcommand("dominance", "evaluate the dominance of parameters");
    dominance->add_option("--params", params_csv, "nd,mn,ph,r,ps")->required();

    auto* fit_cmd = app.add_subcommand("fit", "fit the dominance map to labeled samples");
    fit_cmd->add_option("--samples", samples_path, "labeled samples CSV")->required();
    fit_cmd->add_option("--out", model_out, "model file to write");

    auto* loocv_cmd = app.add_subcommand("loocv", "leave-one-out cross-validation error");
    loocv_cmd->add_option("--samples", samples_path, "labeled samples CSV")->required();

    auto* infer = app.add_subcommand("infer", "infer parameters from a trajectory CSV");
    infer->add_option("--traj", traj_path, "trajectory CSV")->required();
    infer->add_option("--agent", agent, "target agent id")->required();
    infer->add_option("--seed", seed, "filter seed");
    infer->add_option("--out", out_path, "timeline CSV (default: stdout)");

    auto* navigate = app.add_subcommand("navigate", "closed-loop robot navigation run");
    navigate->add_option("--scenario", scenario_spec, "scenario file or builtin name")->required();
    navigate->add_option("--seed", seed, "run seed");
    navigate->add_option("--out", out_dir, "output directory");

    auto* vehicle = app.add_subcommand("vehicle", "vehicle-pedestrian interaction run");
    vehicle->add_option("--scenario", scenario_spec, "scenario file")->required();
    vehicle->add_option("--seed", seed, "run seed");
    vehicle->add_option("--out", out_dir, "output directory");

    app.add_subcommand("bench", "run the acceptance suite");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(scenario_spec, seed, out_dir);
        if (dominance->parsed()) return cmd_dominance(params_csv);
        if (fit_cmd->parsed()) return cmd_fit(samples_path, model_out);
        if (loocv_cmd->parsed()) return cmd_loocv(samples_path);
        if (infer->parsed()) return cmd_infer(traj_path, agent, seed, out_path);
        if (navigate->parsed()) return cmd_navigate(scenario_spec, seed, out_dir);
        if (vehicle->parsed()) return cmd_vehicle(scenario_spec, seed, out_dir);
        return cmd_bench();
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
}
