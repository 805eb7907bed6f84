/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/core/action.hpp"

#include <cmath>
#include <string>

namespace phasebridge {

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Selection: return "selection";
        case ActionKind::Switch: return "switch";
        case ActionKind::Duration: return "duration";
    }
    return "?";
}

ActionKind action_kind_from_string(std::string_view name) {
    if (name == "selection") return ActionKind::Selection;
    if (name == "switch") return ActionKind::Switch;
    if (name == "duration") return ActionKind::Duration;
    throw ValidationError("unknown action kind '" + std::string(name) + "'");
}

double map_duration(double fraction, const PhaseTiming& timing) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw ValidationError("duration fraction " + std::to_string(fraction) + " outside [0, 1]");
    if (fraction == 1.0) return timing.max_green;
    return timing.min_green + fraction * (timing.max_green - timing.min_green);
}

namespace {

// Millisecond resolution for hold times.
Duration to_hold(double seconds) {
    return std::chrono::milliseconds{std::llround(seconds * 1000.0)};
}

}  // namespace

UnifiedCommand convert_action(const RingBarrierConfig& cfg, const Action& action, const PhasePair& current) {
    struct Visitor {
        const RingBarrierConfig& cfg;
        const PhasePair& current;

        UnifiedCommand operator()(const SelectAction& a) const {
            if (!is_compatible(cfg, a.pair)) throw ConflictError("phase pair " + to_string(a.pair) + " conflicts");
            return {a.pair, std::nullopt};
        }
        UnifiedCommand operator()(const SwitchAction& a) const {
            if (a.bit != 0 && a.bit != 1) throw ValidationError("switch bit must be 0 or 1");
            auto next = next_pair(cfg, current);
            return {a.bit == 1 ? next : current, std::nullopt};
        }
        UnifiedCommand operator()(const DurationAction& a) const {
            if (!(a.fraction >= 0.0 && a.fraction <= 1.0))
                throw ValidationError("duration fraction " + std::to_string(a.fraction) + " outside [0, 1]");
            auto next = next_pair(cfg, current);
            return {next, to_hold(map_duration(a.fraction, cfg.pair_timing(next)))};
        }
    };
    return std::visit(Visitor{cfg, current}, action.payload());
}

}  // namespace phasebridge
