/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

#include "phasebridge/wire/signal_state.hpp"

namespace phasebridge {

/// Latest polled SignalState, shared between the poller (single writer) and
/// any number of readers. Sequence-lock: the writer never waits, readers
/// retry until they see one complete snapshot.
class SignalCache {
public:
    void publish(const SignalState& state);
    /// Empty until the first publish.
    std::optional<SignalState> load() const;
    std::uint64_t poll_seq() const { return poll_seq_.load(std::memory_order_acquire); }

private:
    std::atomic<std::uint64_t> version_{0};
    std::atomic<std::uint16_t> masks_{0};  // green | yellow << 8
    std::atomic<std::int64_t> polled_at_{0};
    std::atomic<std::uint64_t> poll_seq_{0};
};

}  // namespace phasebridge
