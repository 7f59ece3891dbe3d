#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmdplab/env.hpp"
#include "cmdplab/harness.hpp"
#include "cmdplab/oracle.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"cmdp-lab: constrained-MDP primal-dual learning laboratory"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-env", "generate a random CMDP");
    std::uint64_t seed = 0;
    int states = 30, actions = 3, horizon = 10;
    std::string out_path = "env.json";
    gen->add_option("--seed", seed, "environment seed");
    gen->add_option("--states", states, "number of states")->check(CLI::PositiveNumber);
    gen->add_option("--actions", actions, "number of actions")->check(CLI::PositiveNumber);
    gen->add_option("--horizon", horizon, "episode horizon")->check(CLI::PositiveNumber);
    gen->add_option("--out", out_path, "output path for the CMDP JSON");

    auto* solve = app.add_subcommand("solve", "solve a CMDP exactly");
    std::string env_path;
    solve->add_option("--env", env_path, "CMDP JSON path")->required();

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    std::string config_path;
    run->add_option("--config", config_path, "experiment config JSON")->required();

    auto* plot = app.add_subcommand("plot", "render run CSVs as a two-panel SVG");
    std::string runs_dir, svg_path = "chart.svg";
    plot->add_option("--runs", runs_dir, "directory of run CSVs")->required();
    plot->add_option("--out", svg_path, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) {
            auto env = cmdplab::generate_random_cmdp(seed, states, actions, horizon);
            cmdplab::save_cmdp(env.cmdp, out_path);
            std::string sidecar = out_path + ".meta.json";
            std::ofstream meta(sidecar);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "{\"slater_gap\":%.17g,\"threshold\":%.17g}\n",
                          env.slater_gap, env.threshold);
            meta << buf;
            std::printf("wrote %s and %s\n", out_path.c_str(), sidecar.c_str());
        } else if (solve->parsed()) {
            auto cmdp = cmdplab::load_cmdp(env_path);
            double v_star = cmdp.num_constraints > 0
                                ? cmdplab::solve_cmdp_lp(cmdp).value
                                : cmdplab::unconstrained_max(cmdp, 0).first;
            double threshold = cmdp.thresholds.empty() ? 0.0 : cmdp.thresholds[0];
            double gap = cmdp.num_constraints == 1 ? cmdplab::slater_gap(cmdp) : 0.0;
            std::printf("{\"v_star\":%.17g,\"threshold\":%.17g,\"slater_gap\":%.17g}\n",
                        v_star, threshold, gap);
        } else if (run->parsed()) {
            auto config = cmdplab::ExperimentConfig::from_json_file(config_path);
            std::string manifest = cmdplab::run_experiment(config);
            std::printf("wrote %s\n", manifest.c_str());
        } else if (plot->parsed()) {
            std::vector<std::string> csvs;
            for (const auto& entry : fs::directory_iterator(runs_dir))
                if (entry.path().extension() == ".csv") csvs.push_back(entry.path().string());
            std::sort(csvs.begin(), csvs.end());
            cmdplab::emit_chart(csvs, svg_path);
            std::printf("wrote %s\n", svg_path.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
