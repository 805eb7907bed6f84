/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <fstream>
#include <memory>
#include <optional>
#include <thread>

#include "phasebridge/controller/virtual_controller.hpp"
#include "phasebridge/runtime/scheduler.hpp"
#include "phasebridge/runtime/transport.hpp"
#include "phasebridge/runtime/udp.hpp"

namespace phasebridge::controller {

/// Runs a VirtualController on a scheduler: datagrams and interval
/// boundaries are all executed there, so the engine has a single owner.
class ControllerService {
public:
    ControllerService(Scheduler& scheduler, VirtualController& controller);

    /// Must be called from the scheduler's executor.
    std::optional<Bytes> handle(std::span<const std::uint8_t> bytes);
    void set_fault_mode(FaultMode mode);

    /// Writes every controller event as one JSON line, flushed per line.
    void log_to(const std::filesystem::path& path);

    VirtualController& controller() { return controller_; }

private:
    void rearm();

    Scheduler& scheduler_;
    VirtualController& controller_;
    TimerId wake_ = 0;
    std::optional<TimePoint> armed_for_;
    std::shared_ptr<std::ofstream> log_;
};

/// UDP front end: one data socket speaking the wire protocol and an optional
/// control socket accepting text lines (`fault silent|reject|normal`, `status`).
class UdpControllerServer {
public:
    UdpControllerServer(Scheduler& scheduler, ControllerService& service, const Endpoint& data,
                        std::optional<Endpoint> control = std::nullopt);
    ~UdpControllerServer();

    std::uint16_t data_port() const { return data_.local_port(); }
    std::optional<std::uint16_t> control_port() const;
    void stop();

private:
    void data_loop();
    void control_loop();

    Scheduler& scheduler_;
    ControllerService& service_;
    UdpSocket data_;
    std::optional<UdpSocket> control_;
    std::atomic<bool> running_{true};
    std::thread data_thread_;
    std::thread control_thread_;
};

}  // namespace phasebridge::controller
