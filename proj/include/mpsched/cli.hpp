#pragma once

#include "mpsched/batch.hpp"
#include "mpsched/csv.hpp"
#include "mpsched/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace mpsched {

// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Multipath transport scheduling experiments"};
    app.require_subcommand(1);

    std::string scenario;
    std::string scheduler;
    std::string out_dir;
    if (const char* env = std::getenv("MPSCHED_OUT")) {
        out_dir = env;
    } else {
        out_dir = "out";
    }
    std::int64_t seed = -1;
    int runs = -1;

    auto add_common = [&](CLI::App* cmd, bool with_scheduler) {
        cmd->add_option("--scenario", scenario, "Preset name or config file")->required();
        if (with_scheduler) {
            cmd->add_option("--scheduler", scheduler, "fifo | fdps | rtt-half");
        }
        cmd->add_option("--seed", seed, "Base seed (overrides config)");
        cmd->add_option("--runs", runs, "Number of runs (overrides config)");
        cmd->add_option("--out", out_dir, "Output directory (default $MPSCHED_OUT or ./out)");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario with one scheduler");
    add_common(run_cmd, true);

    CLI::App* compare_cmd = app.add_subcommand("compare", "Run one scenario with every scheduler");
    add_common(compare_cmd, false);

    CLI::App* presets_cmd = app.add_subcommand("presets", "List built-in scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (presets_cmd->parsed()) {
            for (const std::string& name : preset_names()) {
                std::cout << name << '\n';
            }
            return 0;
        }

        ScenarioConfig cfg = load_scenario(scenario);
        if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
        if (runs >= 0) cfg.runs = runs;

        std::vector<BatchResult> batches;
        if (run_cmd->parsed()) {
            batches.push_back(run_batch(cfg, scheduler));
        } else {
            for (const char* name : {"fifo", "rtt-half", "fdps"}) {
                batches.push_back(run_batch(cfg, name));
            }
        }
        for (const auto& path : emit_outputs(batches, out_dir)) {
            std::cout << path.string() << '\n';
        }
        return 0;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 2;
    }
}

} // namespace mpsched
