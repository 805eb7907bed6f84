/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/wire/signal_state.hpp"

namespace phasebridge {

std::string_view to_string(Color c) {
    switch (c) {
        case Color::Red: return "red";
        case Color::Yellow: return "yellow";
        case Color::Green: return "green";
    }
    return "?";
}

wire::PhaseBitmask SignalState::mask_of(Color c) const {
    wire::PhaseBitmask m;
    for (std::size_t k = 0; k < colors_.size(); ++k)
        if (colors_[k] == c) m.bits |= static_cast<std::uint8_t>(1u << k);
    return m;
}

bool SignalState::matches(const PhasePair& pair) const {
    return greens() == wire::pair_to_mask(pair) && yellows().bits == 0;
}

SignalState assemble_signal_state(wire::PhaseBitmask red, wire::PhaseBitmask yellow, wire::PhaseBitmask green,
                                  TimePoint at) {
    (void)red;  // anything not green or yellow is red
    SignalState s;
    for (int n = 1; n <= kMaxPhaseId; ++n) {
        PhaseId id{n};
        if (green.has(id))
            s.set_color(id, Color::Green);
        else if (yellow.has(id))
            s.set_color(id, Color::Yellow);
    }
    s.polled_at = at;
    return s;
}

}  // namespace phasebridge
