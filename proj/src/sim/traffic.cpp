/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/sim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phasebridge/core/errors.hpp"

namespace phasebridge::sim {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Accepts {"1": v, ...} or [v1, ..., v8].
std::array<double, kMaxPhaseId> per_phase(const json& j, const char* name) {
    std::array<double, kMaxPhaseId> out{};
    if (j.is_null()) return out;
    if (j.is_array()) {
        if (j.size() > out.size()) throw ConfigError(std::string("scenario.") + name + " has more than 8 entries");
        for (std::size_t i = 0; i < j.size(); ++i) out[i] = j[i].get<double>();
    } else if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            int id = 0;
            try {
                id = std::stoi(key);
            } catch (const std::exception&) {
                throw ConfigError(std::string("scenario.") + name + ": bad phase id '" + key + "'");
            }
            if (id < 1 || id > kMaxPhaseId) throw ConfigError(std::string("scenario.") + name + ": phase out of range");
            out[static_cast<std::size_t>(id - 1)] = value.get<double>();
        }
    } else {
        throw ConfigError(std::string("scenario.") + name + " must be an object or array");
    }
    return out;
}

json per_phase_json(const std::array<double, kMaxPhaseId>& xs) {
    json j = json::object();
    for (std::size_t i = 0; i < xs.size(); ++i) j[std::to_string(i + 1)] = xs[i];
    return j;
}

std::int64_t sum(const std::array<std::int64_t, kMaxPhaseId>& xs) { return std::accumulate(xs.begin(), xs.end(), std::int64_t{0}); }

}  // namespace

std::string_view to_string(ClockMode m) { return m == ClockMode::Virtual ? "virtual" : "real"; }

ClockMode clock_mode_from_string(std::string_view name) {
    if (name == "virtual" || name == "VIRTUAL") return ClockMode::Virtual;
    if (name == "real" || name == "REAL_TIME" || name == "real_time") return ClockMode::RealTime;
    throw ConfigError("unknown clock mode '" + std::string(name) + "'");
}

std::int64_t ScenarioConfig::steps_per_interval() const { return std::llround(control_interval / step_length); }

std::int64_t ScenarioConfig::total_steps() const { return std::llround(duration / step_length); }

void ScenarioConfig::validate() const {
    if (!(step_length > 0.0)) throw ConfigError("scenario.step_length must be positive");
    if (!(control_interval > 0.0)) throw ConfigError("scenario.control_interval must be positive");
    const double ratio = control_interval / step_length;
    if (std::llround(ratio) < 1 || std::abs(ratio - static_cast<double>(std::llround(ratio))) > 1e-9)
        throw ConfigError("scenario.control_interval must be a positive multiple of step_length");
    if (!(duration >= 0.0)) throw ConfigError("scenario.duration must not be negative");
    if (!(saturation_rate >= 0.0)) throw ConfigError("scenario.saturation_rate must not be negative");
    for (double r : arrival_rate)
        if (!(r >= 0.0)) throw ConfigError("scenario.arrival_rate entries must not be negative");
    for (double q : initial_queue)
        if (!(q >= 0.0)) throw ConfigError("scenario.initial_queue entries must not be negative");
}

ScenarioConfig scenario_config_from_json(const json& j) {
    ScenarioConfig cfg;
    try {
        cfg.step_length = j.value("step_length", cfg.step_length);
        cfg.control_interval = j.value("control_interval", cfg.control_interval);
        cfg.saturation_rate = j.value("saturation_rate", cfg.saturation_rate);
        cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
        cfg.duration = j.value("duration", cfg.duration);
        if (j.contains("clock_mode")) cfg.clock_mode = clock_mode_from_string(j["clock_mode"].get<std::string>());
        if (j.contains("arrival_rate")) cfg.arrival_rate = per_phase(j["arrival_rate"], "arrival_rate");
        if (j.contains("initial_queue")) cfg.initial_queue = per_phase(j["initial_queue"], "initial_queue");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json to_json(const ScenarioConfig& cfg) {
    return {{"step_length", cfg.step_length},
            {"control_interval", cfg.control_interval},
            {"arrival_rate", per_phase_json(cfg.arrival_rate)},
            {"initial_queue", per_phase_json(cfg.initial_queue)},
            {"saturation_rate", cfg.saturation_rate},
            {"rng_seed", cfg.rng_seed},
            {"duration", cfg.duration},
            {"clock_mode", to_string(cfg.clock_mode)}};
}

TrafficState TrafficState::initial(const ScenarioConfig& cfg) {
    TrafficState s;
    for (std::size_t i = 0; i < s.queue.size(); ++i) s.queue[i] = std::llround(cfg.initial_queue[i] * kMicro);
    s.initial_micro = sum(s.queue);
    return s;
}

std::int64_t TrafficState::total_queue() const { return sum(queue); }
std::int64_t TrafficState::total_arrived() const { return sum(arrived); }
std::int64_t TrafficState::total_departed() const { return sum(departed); }

std::int64_t arrivals_micro(const ScenarioConfig& cfg, PhaseId phase, std::int64_t index) {
    const double rate = cfg.arrival_rate.at(static_cast<std::size_t>(phase.value - 1));
    if (rate <= 0.0) return 0;
    std::uint64_t h = splitmix64(cfg.rng_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(phase.value));
    h = splitmix64(h ^ static_cast<std::uint64_t>(index));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    // Uniform on [0, 2 * mean), so the mean per step is rate * step.
    return std::llround(rate * cfg.step_length * 2.0 * u * kMicro);
}

TrafficState step(const TrafficState& state, const SignalState& signal, const ScenarioConfig& cfg) {
    TrafficState next = state;
    const std::int64_t capacity = std::llround(cfg.saturation_rate * cfg.step_length * kMicro);
    for (int p = 1; p <= kMaxPhaseId; ++p) {
        const auto i = static_cast<std::size_t>(p - 1);
        if (signal.color(PhaseId{p}) == Color::Green) {
            const std::int64_t out = std::min(next.queue[i], capacity);
            next.queue[i] -= out;
            next.departed[i] += out;
        }
        const std::int64_t in = arrivals_micro(cfg, PhaseId{p}, state.steps);
        next.queue[i] += in;
        next.arrived[i] += in;
    }
    next.sim_time += cfg.step();
    ++next.steps;
    return next;
}

}  // namespace phasebridge::sim
