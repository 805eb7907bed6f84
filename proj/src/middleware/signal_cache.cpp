/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/middleware/signal_cache.hpp"

namespace phasebridge {

void SignalCache::publish(const SignalState& state) {
    auto v = version_.load(std::memory_order_relaxed);
    version_.store(v + 1, std::memory_order_relaxed);
    std::atomic_thread_fence(std::memory_order_release);
    masks_.store(static_cast<std::uint16_t>(state.greens().bits | (state.yellows().bits << 8)),
                 std::memory_order_relaxed);
    polled_at_.store(state.polled_at.time_since_epoch().count(), std::memory_order_relaxed);
    poll_seq_.store(state.poll_seq, std::memory_order_relaxed);
    version_.store(v + 2, std::memory_order_release);
}

std::optional<SignalState> SignalCache::load() const {
    std::uint16_t masks;
    std::int64_t polled_at;
    std::uint64_t seq;
    for (;;) {
        auto v1 = version_.load(std::memory_order_acquire);
        if (v1 == 0) return std::nullopt;
        if (v1 & 1u) continue;
        masks = masks_.load(std::memory_order_relaxed);
        polled_at = polled_at_.load(std::memory_order_relaxed);
        seq = poll_seq_.load(std::memory_order_relaxed);
        std::atomic_thread_fence(std::memory_order_acquire);
        if (version_.load(std::memory_order_relaxed) == v1) break;
    }
    wire::PhaseBitmask green{static_cast<std::uint8_t>(masks & 0xFF)};
    wire::PhaseBitmask yellow{static_cast<std::uint8_t>(masks >> 8)};
    auto state = assemble_signal_state({}, yellow, green, TimePoint{Duration{polled_at}});
    state.poll_seq = seq;
    return state;
}

}  // namespace phasebridge
