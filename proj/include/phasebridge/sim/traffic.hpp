/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>

#include <json.hpp>

#include "phasebridge/core/ring_barrier.hpp"
#include "phasebridge/runtime/clock.hpp"
#include "phasebridge/wire/signal_state.hpp"

namespace phasebridge::sim {

enum class ClockMode { RealTime, Virtual };

std::string_view to_string(ClockMode m);
ClockMode clock_mode_from_string(std::string_view name);

struct ScenarioConfig {
    double step_length = 0.25;
    double control_interval = 10.0;
    std::array<double, kMaxPhaseId> arrival_rate{};  // veh/s, index = phase id - 1
    std::array<double, kMaxPhaseId> initial_queue{};
    double saturation_rate = 0.5;  // veh/s while green
    std::uint64_t rng_seed = 1;
    double duration = 1200.0;
    ClockMode clock_mode = ClockMode::Virtual;

    Duration step() const { return from_seconds(step_length); }
    std::int64_t steps_per_interval() const;
    std::int64_t total_steps() const;
    /// Throws ConfigError.
    void validate() const;
};

ScenarioConfig scenario_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Queues are held in micro-vehicles so that arrivals, departures and the
/// queue always balance exactly.
inline constexpr std::int64_t kMicro = 1'000'000;

struct TrafficState {
    std::array<std::int64_t, kMaxPhaseId> queue{};
    std::array<std::int64_t, kMaxPhaseId> arrived{};
    std::array<std::int64_t, kMaxPhaseId> departed{};
    Duration sim_time{0};
    std::int64_t steps = 0;

    static TrafficState initial(const ScenarioConfig& cfg);

    double queue_of(PhaseId id) const { return static_cast<double>(queue_micro(id)) / kMicro; }
    std::int64_t queue_micro(PhaseId id) const { return queue.at(static_cast<std::size_t>(id.value - 1)); }
    std::int64_t pair_queue_micro(const PhasePair& p) const { return queue_micro(p.ring1) + queue_micro(p.ring2); }
    std::int64_t total_queue() const;
    std::int64_t total_arrived() const;
    std::int64_t total_departed() const;
    std::int64_t initial_total() const { return initial_micro; }

    std::int64_t initial_micro = 0;

    bool operator==(const TrafficState&) const = default;
};

/// Vehicles (micro units) arriving at `phase` during step `index`. Stateless:
/// depends only on seed, phase, step index and rate.
std::int64_t arrivals_micro(const ScenarioConfig& cfg, PhaseId phase, std::int64_t index);

/// One step: green phases discharge min(queue, saturation * step), then the
/// step's arrivals join. Advances sim_time by exactly one step.
TrafficState step(const TrafficState& state, const SignalState& signal, const ScenarioConfig& cfg);

}  // namespace phasebridge::sim
