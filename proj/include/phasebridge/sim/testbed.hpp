/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "phasebridge/controller/controller_service.hpp"
#include "phasebridge/middleware/control_server.hpp"
#include "phasebridge/middleware/event_log.hpp"
#include "phasebridge/middleware/manager.hpp"
#include "phasebridge/runtime/scheduler.hpp"
#include "phasebridge/runtime/transport.hpp"
#include "phasebridge/sim/run_config.hpp"

namespace phasebridge::sim {

/// Controller, middleware and log on one virtual clock, linked in-process.
/// Everything runs on the calling thread as the scheduler is driven.
class VirtualTestbed {
public:
    explicit VirtualTestbed(const RunConfig& cfg);

    /// Writes events.jsonl and controller.jsonl into `dir`.
    void open_logs(const std::filesystem::path& dir);
    /// Starts the middleware and runs the clock until it reports ready.
    bool start(Duration limit = std::chrono::seconds(60));

    VirtualScheduler& scheduler() { return scheduler_; }
    controller::VirtualController& controller() { return controller_; }
    controller::ControllerService& service() { return service_; }
    LoopbackTransport& transport() { return transport_; }
    EventLog& log() { return log_; }
    Middleware& middleware() { return middleware_; }

private:
    VirtualScheduler scheduler_;
    controller::VirtualController controller_;
    controller::ControllerService service_;
    LoopbackTransport transport_;
    EventLog log_;
    Middleware middleware_;
};

struct RealOptions {
    /// Start a controller in this process; otherwise connect to `controller.host:port`.
    bool embedded = true;
    /// Port overrides. For the embedded controller 0 picks a free port.
    std::optional<std::uint16_t> controller_port;
    std::optional<std::uint16_t> controller_control_port;
    std::optional<std::uint16_t> middleware_control_port;
};

/// Wall-clock assembly over UDP. The embedded controller has its own
/// scheduler thread, as a separate device would.
class RealTestbed {
public:
    RealTestbed(const RunConfig& cfg, const RealOptions& options);
    ~RealTestbed();
    RealTestbed(const RealTestbed&) = delete;
    RealTestbed& operator=(const RealTestbed&) = delete;

    void open_logs(const std::filesystem::path& dir);
    /// Blocks until the middleware has read the controller once (or failed to).
    bool start(Duration limit = std::chrono::seconds(30));
    void shutdown();

    RealScheduler& scheduler() { return scheduler_; }
    EventLog& log() { return log_; }
    Middleware& middleware() { return *middleware_; }
    /// Embedded controller only.
    controller::ControllerService* service() { return service_.get(); }
    std::optional<std::uint16_t> controller_data_port() const;
    std::optional<std::uint16_t> controller_control_port() const;
    std::optional<std::uint16_t> middleware_control_port() const;

private:
    std::unique_ptr<RealScheduler> controller_scheduler_;
    std::unique_ptr<controller::VirtualController> controller_;
    std::unique_ptr<controller::ControllerService> service_;
    std::unique_ptr<controller::UdpControllerServer> server_;

    RealScheduler scheduler_;
    std::unique_ptr<UdpTransport> transport_;
    EventLog log_;
    std::unique_ptr<Middleware> middleware_;
    std::unique_ptr<MiddlewareControlServer> control_;
    bool shut_down_ = false;
};

}  // namespace phasebridge::sim
