/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "phasebridge/runtime/clock.hpp"
#include "phasebridge/wire/codec.hpp"

namespace phasebridge {

enum class Color : std::uint8_t { Red, Yellow, Green };

std::string_view to_string(Color c);

/// Red/yellow/green indication of every phase at one poll.
class SignalState {
public:
    SignalState() { colors_.fill(Color::Red); }

    Color color(PhaseId id) const { return colors_.at(static_cast<std::size_t>(id.value - 1)); }
    void set_color(PhaseId id, Color c) { colors_.at(static_cast<std::size_t>(id.value - 1)) = c; }

    wire::PhaseBitmask mask_of(Color c) const;
    wire::PhaseBitmask greens() const { return mask_of(Color::Green); }
    wire::PhaseBitmask yellows() const { return mask_of(Color::Yellow); }
    wire::PhaseBitmask reds() const { return mask_of(Color::Red); }

    /// Both phases of `pair` green and every other phase red.
    bool matches(const PhasePair& pair) const;

    TimePoint polled_at{};
    std::uint64_t poll_seq = 0;

    bool operator==(const SignalState&) const = default;

private:
    std::array<Color, kMaxPhaseId> colors_{};
};

/// Per-phase colour from the three status groups. Overlapping bits resolve
/// green over yellow over red; a phase with no bit set is red.
SignalState assemble_signal_state(wire::PhaseBitmask red, wire::PhaseBitmask yellow, wire::PhaseBitmask green,
                                  TimePoint at);

}  // namespace phasebridge
