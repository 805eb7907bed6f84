/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "phasebridge/controller/virtual_controller.hpp"
#include "phasebridge/core/ring_barrier.hpp"
#include "phasebridge/middleware/manager.hpp"
#include "phasebridge/sim/traffic.hpp"

namespace phasebridge::sim {

/// `controller` section: where the middleware finds the controller, and how
/// an embedded one starts.
struct ControllerLink {
    std::string host = "127.0.0.1";
    std::uint16_t port = 5601;
    std::uint16_t control_port = 5602;
    controller::FaultMode fault = controller::FaultMode::Normal;
    double loopback_delay = 0.0005;  // one-way, virtual clock only
};

/// A whole configuration file.
struct RunConfig {
    RingBarrierConfig intersection;
    ControllerLink controller;
    MiddlewareConfig middleware;
    ScenarioConfig scenario;
};

ControllerLink controller_link_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ControllerLink& link);

/// Throws ConfigError. Only `intersection` is required.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// The bundled example: standard 8-phase intersection and default parameters.
RunConfig standard_run_config();

}  // namespace phasebridge::sim
