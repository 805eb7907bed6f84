/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/sim/run_config.hpp"

#include "phasebridge/core/config_json.hpp"
#include "phasebridge/core/errors.hpp"

namespace phasebridge::sim {

using nlohmann::json;

namespace {

std::uint16_t port_value(const json& j, const char* key, std::uint16_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = j[key].get<long long>();
    if (v < 0 || v > 65535) throw ConfigError(std::string("controller.") + key + " out of range");
    return static_cast<std::uint16_t>(v);
}

}  // namespace

ControllerLink controller_link_from_json(const json& j) {
    ControllerLink link;
    try {
        link.host = j.value("host", link.host);
        link.port = port_value(j, "port", link.port);
        link.control_port = port_value(j, "control_port", link.control_port);
        if (j.contains("fault")) link.fault = controller::fault_mode_from_string(j["fault"].get<std::string>());
        link.loopback_delay = j.value("loopback_delay", link.loopback_delay);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("controller: ") + e.what());
    }
    if (!(link.loopback_delay >= 0.0)) throw ConfigError("controller.loopback_delay must not be negative");
    return link;
}

json to_json(const ControllerLink& link) {
    return {{"host", link.host},
            {"port", link.port},
            {"control_port", link.control_port},
            {"fault", controller::to_string(link.fault)},
            {"loopback_delay", link.loopback_delay}};
}

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (!j.contains("intersection")) throw ConfigError("configuration has no 'intersection' section");
    const json empty = json::object();
    auto section = [&](const char* name) -> const json& {
        if (!j.contains(name)) return empty;
        if (!j[name].is_object()) throw ConfigError(std::string("'") + name + "' must be an object");
        return j[name];
    };
    return RunConfig{ring_barrier_from_json(j["intersection"]), controller_link_from_json(section("controller")),
                     middleware_config_from_json(section("middleware")),
                     scenario_config_from_json(section("scenario"))};
}

RunConfig load_run_config(const std::filesystem::path& path) { return run_config_from_json(read_json_file(path)); }

json to_json(const RunConfig& cfg) {
    return {{"intersection", phasebridge::to_json(cfg.intersection)},
            {"controller", to_json(cfg.controller)},
            {"middleware", phasebridge::to_json(cfg.middleware)},
            {"scenario", to_json(cfg.scenario)}};
}

RunConfig standard_run_config() {
    RunConfig cfg{standard_intersection(), {}, {}, {}};
    cfg.scenario.arrival_rate.fill(0.1);
    return cfg;
}

}  // namespace phasebridge::sim
