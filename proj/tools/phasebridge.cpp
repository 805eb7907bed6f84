/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "phasebridge/cli/commands.hpp"
#include "phasebridge/core/errors.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
    using namespace phasebridge::cli;

    CLI::App app{"phasebridge: signal-controller middleware testbed"};
    app.require_subcommand(1);

    ControllerArgs ctl;
    std::string ctl_config;
    auto* controller = app.add_subcommand("controller", "Serve the virtual signal controller over UDP");
    controller->add_option("--config", ctl_config, "Configuration JSON")->check(CLI::ExistingFile);
    controller->add_option("--port", ctl.port, "Data port")->capture_default_str();
    controller->add_option("--control-port", ctl.control_port, "Text control port (fault X, status)")
        ->capture_default_str();
    controller->add_option("--fault", ctl.fault, "normal | silent | reject")->capture_default_str();
    std::string ctl_log;
    controller->add_option("--log", ctl_log, "Write controller events (JSONL)");

    RunArgs run;
    std::string run_config, run_out = ".";
    auto* run_cmd = app.add_subcommand("run", "Run a closed-loop experiment");
    run_cmd->add_option("--config", run_config, "Configuration JSON")->check(CLI::ExistingFile);
    run_cmd->add_option("--agent", run.agent, "selection | switch | duration | fixed")->capture_default_str();
    run_cmd->add_option("--duration", run.duration, "Simulated seconds");
    run_cmd->add_option("--clock", run.clock, "virtual | real")->capture_default_str();
    run_cmd->add_option("--fault", run.fault, "Fault mode of the embedded controller");
    run_cmd->add_flag("--embedded", run.embedded, "Start the controller in-process (implied by --clock virtual)");
    run_cmd->add_option("--out", run_out, "Output directory")->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Arrival seed");
    run_cmd->add_option("--host", run.host, "Controller host");
    run_cmd->add_option("--port", run.port, "Controller data port");
    run_cmd->add_option("--control-port", run.control_port, "Serve recover/snapshot on this UDP port (real clock)");

    ReportArgs report;
    std::string report_events, report_traj;
    auto* report_cmd = app.add_subcommand("report", "Latency table and trajectory export from an event log");
    report_cmd->add_option("events", report_events, "events.jsonl")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--trajectory", report_traj, "Where to write trajectory.json");

    RecoverArgs recover;
    auto* recover_cmd = app.add_subcommand("recover", "Ask a running middleware to recover from TIMEOUT");
    recover_cmd->add_option("--endpoint", recover.endpoint, "Middleware control host:port")->capture_default_str();
    recover_cmd->add_option("--timeout", recover.timeout, "Seconds to wait for the answer")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    init_logging();
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        if (*controller) {
            if (!ctl_config.empty()) ctl.config = ctl_config;
            if (!ctl_log.empty()) ctl.log = ctl_log;
            return cmd_controller(ctl, g_stop);
        }
        if (*run_cmd) {
            if (!run_config.empty()) run.config = run_config;
            run.out = run_out;
            return cmd_run(run, std::cout);
        }
        if (*report_cmd) {
            report.events = report_events;
            if (!report_traj.empty()) report.trajectory = report_traj;
            return cmd_report(report, std::cout);
        }
        if (*recover_cmd) return cmd_recover(recover, std::cout);
    } catch (const phasebridge::ConfigError& e) {
        spdlog::error("configuration error: {}", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitError;
    }
    return kExitError;
}
