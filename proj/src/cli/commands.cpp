/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "phasebridge/controller/controller_service.hpp"
#include "phasebridge/core/errors.hpp"
#include "phasebridge/middleware/control_server.hpp"
#include "phasebridge/middleware/latency.hpp"
#include "phasebridge/sim/run_loop.hpp"
#include "phasebridge/sim/testbed.hpp"

namespace phasebridge::cli {

using nlohmann::json;

namespace {

sim::RunConfig load_config(const std::optional<std::filesystem::path>& path) {
    return path ? sim::load_run_config(*path) : sim::standard_run_config();
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

std::string greens_text(wire::PhaseBitmask mask) {
    std::string out = "[";
    for (auto id : wire::mask_to_phases(mask)) out += (out.size() > 1 ? "," : "") + std::to_string(id.value);
    return out + "]";
}

}  // namespace

void init_logging() {
    auto logger = spdlog::stderr_color_mt("phasebridge");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* level = std::getenv("PHASEBRIDGE_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

int cmd_controller(const ControllerArgs& args, const std::atomic<bool>& stop) {
    sim::RunConfig cfg = load_config(args.config);
    const auto fault = controller::fault_mode_from_string(args.fault);

    RealScheduler scheduler;
    controller::VirtualController ctrl(cfg.intersection, scheduler.now());
    controller::ControllerService service(scheduler, ctrl);
    {
        std::promise<void> ready;
        scheduler.post([&] {
            if (args.log) service.log_to(*args.log);
            service.set_fault_mode(fault);
            ready.set_value();
        });
        ready.get_future().wait();
    }

    std::optional<Endpoint> control;
    if (args.control_port) control = Endpoint{"127.0.0.1", *args.control_port};
    std::unique_ptr<controller::UdpControllerServer> server;
    try {
        server = std::make_unique<controller::UdpControllerServer>(scheduler, service,
                                                                   Endpoint{"127.0.0.1", args.port}, control);
    } catch (const std::system_error& e) {
        spdlog::error("cannot listen: {}", e.what());
        scheduler.stop();
        return kExitError;
    }
    spdlog::info("controller listening on 127.0.0.1:{}{}, fault {}, greens {}", server->data_port(),
                 server->control_port() ? fmt::format(" (control {})", *server->control_port()) : "",
                 controller::to_string(fault), greens_text(ctrl.greens()));

    while (!stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));

    server->stop();
    scheduler.stop();
    spdlog::info("controller stopped");
    return kExitOk;
}

int cmd_run(const RunArgs& args, std::ostream& out) {
    sim::RunConfig cfg = load_config(args.config);
    const auto agent = sim::agent_kind_from_string(args.agent);
    const auto clock = sim::clock_mode_from_string(args.clock);
    if (args.duration) {
        if (*args.duration < 0) throw ConfigError("--duration must not be negative");
        cfg.scenario.duration = *args.duration;
    }
    if (args.seed) cfg.scenario.rng_seed = *args.seed;
    if (args.fault) cfg.controller.fault = controller::fault_mode_from_string(*args.fault);
    if (args.host) cfg.controller.host = *args.host;
    if (args.port) cfg.controller.port = *args.port;
    cfg.scenario.clock_mode = clock;
    cfg.scenario.validate();

    std::filesystem::create_directories(args.out);
    std::ofstream harness(args.out / "harness.jsonl", std::ios::trunc);
    if (!harness) throw ConfigError("cannot write " + (args.out / "harness.jsonl").string());
    write_json(args.out / "manifest.json", {{"agent", args.agent},
                                            {"clock", args.clock},
                                            {"embedded", args.embedded || clock == sim::ClockMode::Virtual},
                                            {"config", sim::to_json(cfg)}});

    sim::RunHooks hooks;
    hooks.on_timeout = [](TimeoutCause c) { spdlog::warn("middleware in TIMEOUT ({}); stepping paused", to_string(c)); };
    hooks.on_resumed = [] { spdlog::info("middleware recovered; stepping resumed"); };

    sim::RunResult result;
    bool started = false;
    if (clock == sim::ClockMode::Virtual) {
        if (args.control_port) spdlog::warn("--control-port is ignored with the virtual clock");
        sim::VirtualTestbed bed(cfg);
        bed.open_logs(args.out);
        started = bed.start();
        if (started) {
            sim::VirtualPacer pacer(bed.scheduler());
            result = sim::run_loop(cfg.scenario, cfg.intersection, agent, bed.middleware(), pacer, hooks, &harness);
        }
    } else {
        sim::RealOptions options;
        options.embedded = args.embedded;
        if (args.port) options.controller_port = args.port;
        options.middleware_control_port = args.control_port;
        sim::RealTestbed bed(cfg, options);
        bed.open_logs(args.out);
        if (auto p = bed.controller_data_port()) spdlog::info("embedded controller on 127.0.0.1:{}", *p);
        if (auto p = bed.middleware_control_port()) spdlog::info("middleware control on 127.0.0.1:{}", *p);
        started = bed.start(std::chrono::seconds(30));
        if (started) {
            sim::RealPacer pacer(bed.scheduler().clock());
            result = sim::run_loop(cfg.scenario, cfg.intersection, agent, bed.middleware(), pacer, hooks, &harness);
        }
        bed.shutdown();
    }

    if (!started) {
        spdlog::error("controller did not answer the startup status read");
        result.agent = agent;
        result.traffic = sim::TrafficState::initial(cfg.scenario);
        result.ended_in_timeout = true;
        result.cause = TimeoutCause::CommFailure;
    }
    auto metrics = result.metrics();
    write_json(args.out / "metrics.json", metrics);

    fmt::print(out, "agent {} | steps {} | commands {} | departures {:.3f} | mean queue {:.3f} | {}\n",
               args.agent, result.steps, result.invocations.size(), metrics["total_departures"].get<double>(),
               result.mean_queue(),
               result.ended_in_timeout ? fmt::format("TIMEOUT ({})", to_string(result.cause.value_or(TimeoutCause::CommFailure)))
                                       : std::string("clean"));
    return result.ended_in_timeout ? kExitTimeout : kExitOk;
}

int cmd_report(const ReportArgs& args, std::ostream& out) {
    auto loaded = read_event_log(args.events);
    if (loaded.skipped_lines) spdlog::warn("skipped {} unreadable line(s)", loaded.skipped_lines);

    const auto table = internal_latency(loaded.records);
    out << "Internal latency (ACTION_OUT -> DISPATCHED)\n" << table.format();

    const auto traces = command_traces(loaded.records);
    std::map<ActionKind, std::vector<double>> holds;
    std::size_t nominal = 0;
    json trajectory = json::array();
    for (const auto& t : traces) {
        if (t.nominal_order()) ++nominal;
        if (t.kind && t.hold()) holds[*t.kind].push_back(to_seconds(*t.hold()));
        trajectory.push_back(to_json(t));
    }
    out << "\nHold duration (DISPATCHED -> HOLD_RELEASED)\n";
    out << fmt::format("{:<10} {:>6} {:>10} {:>10}\n", "action", "N", "min (s)", "max (s)");
    for (const auto& [kind, xs] : holds) {
        auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        out << fmt::format("{:<10} {:>6} {:>10.3f} {:>10.3f}\n", to_string(kind), xs.size(), *lo, *hi);
    }
    out << fmt::format("\ncommands {} | nominal event order {} | skipped lines {}\n", traces.size(), nominal,
                       loaded.skipped_lines);

    const auto path = args.trajectory.value_or(args.events.parent_path() / "trajectory.json");
    write_json(path, {{"commands", trajectory}, {"latency", table.to_json()}});
    out << "trajectory written to " << path.string() << '\n';
    return kExitOk;
}

int cmd_recover(const RecoverArgs& args, std::ostream& out) {
    const auto remote = parse_endpoint(args.endpoint);
    auto reply = request_recover(remote, from_seconds(args.timeout));
    if (!reply) {
        out << "no answer from " << remote.str() << '\n';
        return kExitError;
    }
    if (reply->starts_with("PRECONDITION ")) {
        out << "precondition failed: " << reply->substr(13) << '\n';
        return kExitError;
    }
    out << *reply << '\n';
    return reply->starts_with("RECOVERED") ? kExitOk : kExitTimeout;
}

}  // namespace phasebridge::cli
