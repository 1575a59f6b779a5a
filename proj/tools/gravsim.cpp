// Copyright (c) 2026 The Gravity Simulator developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.
//
// gravsim: scenario-driven deterministic runner for the Gravity oracle
// network. `run` executes a scenario and writes report.json, ledger.log,
// per-chain txs_<chain>.log and per-node trace_<node>.log to the output
// directory; `validate` checks a scenario file; `report` summarizes a
// finished run directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gravity/scenario.hpp"
#include "gravity/simulation.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override, std::optional<std::uint64_t> ticks_override) {
    gravity::Scenario scenario;
    try {
        scenario = gravity::load_scenario_file(scenario_path);
    } catch (const gravity::ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    if (seed_override) {
        scenario.seed = *seed_override;
    }
    if (ticks_override) {
        scenario.ticks = *ticks_override;
    }
    gravity::Simulation sim(std::move(scenario));
    gravity::RunReport report = sim.run();
    sim.write_outputs(out_dir);
    std::cout << gravity::report_summary_text(gravity::report_to_json(report));
    std::cout << "outputs written to " << out_dir << "\n";
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    try {
        gravity::load_scenario_file(scenario_path);
    } catch (const gravity::ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::cout << "ok: " << scenario_path << " is a valid scenario\n";
    return 0;
}

int cmd_report(const std::string& run_dir, const std::string& format) {
    const auto path = std::filesystem::path(run_dir) / "report.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "no report.json under " << run_dir << "\n";
        return 2;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (format == "json") {
        std::cout << buffer.str();
    } else {
        std::cout << gravity::report_summary_text(buffer.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gravity oracle-network simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed_value = 0;
    std::uint64_t ticks_value = 0;

    auto* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory");
    auto* seed_opt = run->add_option("--seed", seed_value, "override the scenario seed");
    auto* ticks_opt = run->add_option("--ticks", ticks_value, "override the run length");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "validate a scenario file");
    validate->add_option("scenario", validate_path, "scenario JSON file")->required();

    std::string run_dir;
    std::string format = "text";
    auto* report = app.add_subcommand("report", "summarize a finished run");
    report->add_option("run_dir", run_dir, "run output directory")->required();
    report->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, out_dir,
                           seed_opt->count() ? std::optional<std::uint64_t>(seed_value)
                                             : std::nullopt,
                           ticks_opt->count() ? std::optional<std::uint64_t>(ticks_value)
                                              : std::nullopt);
        }
        if (validate->parsed()) {
            return cmd_validate(validate_path);
        }
        if (report->parsed()) {
            return cmd_report(run_dir, format);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
