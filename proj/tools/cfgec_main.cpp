// cfgec: experiment driver for guidance-error-correction sampling studies.
//
// Subcommands: sample, bounds, trajectory, sweep. Each takes --config,
// repeated --set key.path=value overrides, and --out <dir>.
// Exit codes: 0 ok, 1 config error, 2 invariant violation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfgec/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file (defaults used if omitted)");
    cmd->add_option("--set", args.overrides, "override a config field, key.path=value")
        ->take_all();
    cmd->add_option("--out", args.out_dir, "output directory");
}

cfgec::RunConfig resolve_config(const CommonArgs& args) {
    json j = json::object();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw cfgec::ConfigError("cannot open config file: " + args.config_path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw cfgec::ConfigError("config parse error: " + std::string(e.what()));
        }
    }
    for (const auto& ov : args.overrides) cfgec::apply_override(j, ov);
    return cfgec::RunConfig::from_json(j);
}

bool summary_has_nan(const cfgec::SampleSummary& summary) {
    for (const auto& m : summary.methods) {
        for (double v : {m.quality.energy_distance, m.quality.alignment, m.mean_e_sample,
                         m.mean_abs_inner}) {
            if (!std::isfinite(v)) return true;
        }
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guidance-error-correction sampling laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* cmd_sample = app.add_subcommand("sample", "run trajectories per method, write summary.json");
    CLI::App* cmd_bounds = app.add_subcommand("bounds", "audit the sampling-error bounds, write bounds.json");
    CLI::App* cmd_traj = app.add_subcommand("trajectory", "single detailed trajectory, write trajectory.csv");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "guidance-scale sweep, write sweep.csv");
    for (auto* c : {cmd_sample, cmd_bounds, cmd_traj, cmd_sweep}) add_common(c, args);

    CLI11_PARSE(app, argc, argv);

    try {
        cfgec::RunConfig config = resolve_config(args);
        fs::create_directories(args.out_dir);
        fs::path out(args.out_dir);

        if (cmd_sample->parsed()) {
            cfgec::SampleSummary summary = cfgec::run_sample(config);
            cfgec::write_json_file((out / "summary.json").string(),
                                   cfgec::summary_to_json(summary, config));
            if (summary_has_nan(summary)) {
                std::cerr << "error: non-finite value in summary\n";
                return 2;
            }
            std::cout << "wrote " << (out / "summary.json").string() << "\n";
        } else if (cmd_bounds->parsed()) {
            cfgec::BoundsAudit audit = cfgec::run_bounds(config);
            cfgec::write_json_file((out / "bounds.json").string(),
                                   cfgec::bounds_to_json(audit, config));
            std::cout << "wrote " << (out / "bounds.json").string() << "\n";
            if (!audit.ok()) {
                std::cerr << "error: bound violation detected\n";
                return 2;
            }
        } else if (cmd_traj->parsed()) {
            cfgec::TrajectoryRecord record = cfgec::run_single_trajectory(config);
            cfgec::write_trajectory_csv((out / "trajectory.csv").string(), record, config);
            std::cout << "wrote " << (out / "trajectory.csv").string() << "\n";
        } else if (cmd_sweep->parsed()) {
            auto rows = cfgec::run_sweep(config);
            cfgec::write_sweep_csv((out / "sweep.csv").string(), rows, config);
            std::cout << "wrote " << (out / "sweep.csv").string() << "\n";
        }
    } catch (const cfgec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
