// Command-line front end: scenario runner, catalog listing and pulse
// schedule dumps. Exit codes: 0 ok, 1 configuration error, 2 numerical
// failure.

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "entlab/scenario.hpp"

namespace es = entlab::scenario;

int main(int argc, char** argv) {
    CLI::App app{"entlab - two-atom entanglement dynamics and atomic-ensemble "
                 "cluster-state laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "run a scenario from a config file");
    run_cmd->add_option("config", config_path, "key = value configuration file")
        ->required();

    auto* list_cmd = app.add_subcommand("list", "list the scenario catalog");

    std::string protocol_name;
    std::string schedule_out;
    double schedule_r = 0.5;
    auto* dump_cmd = app.add_subcommand("dump-schedule",
                                        "print the pulse schedule of a protocol");
    dump_cmd->add_option("protocol", protocol_name,
                         "single_ensemble_12 | four_mode_12 | linear_13 | square_13 | "
                         "tshape_13")
        ->required();
    dump_cmd->add_option("--r", schedule_r, "squeeze ratio in (0, 1)");
    dump_cmd->add_option("--output", schedule_out, "write to a file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            es::run(es::ScenarioConfig::from_file(config_path));
        } else if (*list_cmd) {
            std::cout << es::list_scenarios();
        } else if (*dump_cmd) {
            const auto protocol = es::protocol_from_string(protocol_name);
            if (!protocol)
                throw entlab::ConfigError("unknown protocol '" + protocol_name + "'");
            const std::string body = es::schedule_csv(*protocol, schedule_r);
            if (schedule_out.empty()) {
                std::cout << body;
            } else {
                std::ofstream f(schedule_out, std::ios::binary);
                if (!f) throw entlab::ConfigError("cannot open '" + schedule_out + "'");
                f << body;
            }
        }
    } catch (const entlab::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const entlab::ContractViolation& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "numerical error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
