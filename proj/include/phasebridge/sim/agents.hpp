/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <string_view>

#include "phasebridge/core/action.hpp"
#include "phasebridge/sim/traffic.hpp"

namespace phasebridge::sim {

/// `Fixed` always asks for the next pair (switch bit 1): a plain fixed cycle.
enum class AgentKind { Selection, Switch, Duration, Fixed };

std::string_view to_string(AgentKind k);
AgentKind agent_kind_from_string(std::string_view name);
ActionKind action_kind_of(AgentKind k);
/// Duration agents run whenever the manager is idle, the others on a fixed interval.
bool runs_on_interval(AgentKind k);

/// Admissible pair with the largest summed queue; ties go to the lowest (ring1, ring2).
Action agent_select(const TrafficState& traffic, const RingBarrierConfig& cfg);
/// 1 iff the next pair's queue strictly exceeds the current pair's.
Action agent_switch(const TrafficState& traffic, const PhasePair& current, const RingBarrierConfig& cfg);
/// Fraction = next-pair queue / 20 vehicles, clamped to [0, 1].
Action agent_duration(const TrafficState& traffic, const PhasePair& current, const RingBarrierConfig& cfg);
Action agent_fixed();

Action decide(AgentKind kind, const TrafficState& traffic, const PhasePair& current, const RingBarrierConfig& cfg);

/// Short label of a decision, used for decision counts: "[2,6]", "1", "0.6".
std::string decision_label(const Action& action);

}  // namespace phasebridge::sim
