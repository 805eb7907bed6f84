/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/sim/agents.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "phasebridge/core/errors.hpp"

namespace phasebridge::sim {

std::string_view to_string(AgentKind k) {
    switch (k) {
        case AgentKind::Selection: return "selection";
        case AgentKind::Switch: return "switch";
        case AgentKind::Duration: return "duration";
        case AgentKind::Fixed: return "fixed";
    }
    return "?";
}

AgentKind agent_kind_from_string(std::string_view name) {
    if (name == "selection") return AgentKind::Selection;
    if (name == "switch") return AgentKind::Switch;
    if (name == "duration") return AgentKind::Duration;
    if (name == "fixed") return AgentKind::Fixed;
    throw ConfigError("unknown agent '" + std::string(name) + "'");
}

ActionKind action_kind_of(AgentKind k) {
    switch (k) {
        case AgentKind::Selection: return ActionKind::Selection;
        case AgentKind::Duration: return ActionKind::Duration;
        default: return ActionKind::Switch;
    }
}

bool runs_on_interval(AgentKind k) { return k != AgentKind::Duration; }

Action agent_select(const TrafficState& traffic, const RingBarrierConfig& cfg) {
    const auto pairs = enumerate_admissible_pairs(cfg);
    if (pairs.empty()) throw ConfigError("no admissible phase pairs");
    // enumerate_admissible_pairs is sorted, so the first maximum wins ties.
    PhasePair best = pairs.front();
    std::int64_t best_q = traffic.pair_queue_micro(best);
    for (const auto& p : pairs) {
        const auto q = traffic.pair_queue_micro(p);
        if (q > best_q) {
            best = p;
            best_q = q;
        }
    }
    return Action::select(best);
}

Action agent_switch(const TrafficState& traffic, const PhasePair& current, const RingBarrierConfig& cfg) {
    const auto next = next_pair(cfg, current);
    return Action::switch_to(traffic.pair_queue_micro(next) > traffic.pair_queue_micro(current) ? 1 : 0);
}

Action agent_duration(const TrafficState& traffic, const PhasePair& current, const RingBarrierConfig& cfg) {
    const auto next = next_pair(cfg, current);
    const double q = static_cast<double>(traffic.pair_queue_micro(next)) / kMicro;
    return Action::duration(std::clamp(q / 20.0, 0.0, 1.0));
}

Action agent_fixed() { return Action::switch_to(1); }

Action decide(AgentKind kind, const TrafficState& traffic, const PhasePair& current, const RingBarrierConfig& cfg) {
    switch (kind) {
        case AgentKind::Selection: return agent_select(traffic, cfg);
        case AgentKind::Switch: return agent_switch(traffic, current, cfg);
        case AgentKind::Duration: return agent_duration(traffic, current, cfg);
        case AgentKind::Fixed: return agent_fixed();
    }
    return agent_fixed();
}

std::string decision_label(const Action& action) {
    return std::visit(
        [](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SelectAction>)
                return fmt::format("[{},{}]", a.pair.ring1.value, a.pair.ring2.value);
            else if constexpr (std::is_same_v<T, SwitchAction>)
                return std::to_string(a.bit);
            else
                return fmt::format("{:.1f}", a.fraction);
        },
        action.payload());
}

}  // namespace phasebridge::sim
