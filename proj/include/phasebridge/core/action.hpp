/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "phasebridge/core/ring_barrier.hpp"
#include "phasebridge/runtime/clock.hpp"

namespace phasebridge {

enum class ActionKind { Selection, Switch, Duration };

std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view name);

/// Acyclic: serve this pair next.
struct SelectAction {
    PhasePair pair;
    bool operator==(const SelectAction&) const = default;
};

/// Cyclic: 0 keeps the current pair, 1 advances to the next one in the sequence.
struct SwitchAction {
    int bit = 0;
    bool operator==(const SwitchAction&) const = default;
};

/// Cyclic: advance to the next pair and hold it for a fraction of its
/// [min_green, max_green] window.
struct DurationAction {
    double fraction = 0.0;
    bool operator==(const DurationAction&) const = default;
};

class Action {
public:
    using Payload = std::variant<SelectAction, SwitchAction, DurationAction>;

    Action(SelectAction a) : payload_(a) {}
    Action(SwitchAction a) : payload_(a) {}
    Action(DurationAction a) : payload_(a) {}

    static Action select(PhasePair pair) { return SelectAction{pair}; }
    static Action switch_to(int bit) { return SwitchAction{bit}; }
    static Action duration(double fraction) { return DurationAction{fraction}; }

    ActionKind kind() const { return static_cast<ActionKind>(payload_.index()); }
    const Payload& payload() const { return payload_; }

    bool operator==(const Action&) const = default;

private:
    Payload payload_;
};

/// What the manager sends to the controller: one phase per ring, plus a
/// green hold when the action was a duration action.
struct UnifiedCommand {
    PhasePair pair;
    std::optional<Duration> hold;

    bool operator==(const UnifiedCommand&) const = default;
};

/// Affine map [0, 1] -> [min_green, max_green], in seconds.
double map_duration(double fraction, const PhaseTiming& timing);

/// Turns any action into a unified command. `current` is the pair being served.
/// Throws ConflictError for an incompatible selection, ValidationError for a
/// malformed action and SequenceError when a cyclic action starts outside the cycle.
UnifiedCommand convert_action(const RingBarrierConfig& cfg, const Action& action, const PhasePair& current);

}  // namespace phasebridge
