// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: runs experiments from a config file, validates
// configs, and evaluates a single schedule/instance pair.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "jtous/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"jammed-uplink scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string schedule_path;
    std::string instance_path;
    bool as_json = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment config and write CSV results");
    run->add_option("config", config_path, "experiment config file")->required();

    CLI::App* validate = app.add_subcommand("validate", "parse and check an experiment config");
    validate->add_option("config", config_path, "experiment config file")->required();

    CLI::App* eval = app.add_subcommand("eval", "evaluate one schedule against one instance");
    eval->add_option("schedule", schedule_path, "schedule file")->required();
    eval->add_option("instance", instance_path, "instance file")->required();
    eval->add_flag("--json", as_json, "emit machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const jtous::WrittenArtifacts artifacts = jtous::run_experiment(config_path);
            jtous::write_summary(std::cout, artifacts.report, false);
            std::cout << "\nwritten:\n";
            for (const auto& file : artifacts.files) std::cout << "  " << file.string() << '\n';
            return 0;
        }
        if (validate->parsed()) {
            jtous::parse_experiment(config_path);
            std::cout << "config ok\n";
            return 0;
        }
        if (eval->parsed()) {
            return jtous::evaluate_single(schedule_path, instance_path, as_json, std::cout,
                                          std::cerr);
        }
    } catch (const jtous::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
