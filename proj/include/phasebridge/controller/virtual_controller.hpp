/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phasebridge/core/ring_barrier.hpp"
#include "phasebridge/runtime/clock.hpp"
#include "phasebridge/wire/codec.hpp"

namespace phasebridge::controller {

enum class EnginePhase { Resting, MinGreen, Yellow, AllRed };
enum class FaultMode { Normal, Silent, RejectCalls };
enum class CallResult { Accepted, Rejected, NoOp };

std::string_view to_string(EnginePhase p);
std::string_view to_string(FaultMode f);
std::string_view to_string(CallResult r);
FaultMode fault_mode_from_string(std::string_view name);

/// One line of the controller log. `kind` is one of STARTUP, VEH_CALL,
/// YELLOW, ALL_RED, GREEN, FAULT_<mode>.
struct ControllerEvent {
    TimePoint t;
    std::string kind;
    wire::PhaseBitmask greens;
    wire::PhaseBitmask yellows;
    wire::PhaseBitmask reds;
    std::optional<wire::PhaseBitmask> call;
    std::optional<CallResult> result;

    nlohmann::json to_json() const;
};

/// Free-mode signal controller emulator. Serves vehicle calls through the
/// green -> yellow -> all-red -> green transition and answers status reads.
/// Single owner; callers serialize access.
class VirtualController {
public:
    VirtualController(RingBarrierConfig cfg, TimePoint start);

    /// Decodes and dispatches one request. Returns the encoded reply, or
    /// nothing when the controller is silent.
    std::optional<std::vector<std::uint8_t>> handle_datagram(std::span<const std::uint8_t> bytes, TimePoint now);

    CallResult request_service(wire::PhaseBitmask call, TimePoint now);

    /// Advances the engine to `now`. Interval boundaries inside the window are
    /// applied at their exact instants, so the result does not depend on how
    /// the window is split.
    void advance_to(TimePoint now);
    void tick(Duration dt) { advance_to(now_ + dt); }

    /// Next instant at which the engine changes state on its own.
    std::optional<TimePoint> next_deadline() const;

    void set_fault_mode(FaultMode mode, TimePoint now);
    FaultMode fault_mode() const { return fault_; }

    EnginePhase engine_phase() const { return engine_; }
    /// Phases currently showing green (empty during yellow and all-red).
    wire::PhaseBitmask greens() const;
    wire::PhaseBitmask yellows() const;
    wire::PhaseBitmask reds() const;
    /// Phases of the interval in progress: green or, during yellow, the terminating pair.
    wire::PhaseBitmask active() const { return active_; }
    std::optional<wire::PhaseBitmask> pending_call() const { return pending_; }
    TimePoint now() const { return now_; }

    const std::vector<ControllerEvent>& events() const { return events_; }
    void clear_events() { events_.clear(); }
    /// Invoked for every new event, after it is appended.
    void on_event(std::function<void(const ControllerEvent&)> fn) { listener_ = std::move(fn); }

    const RingBarrierConfig& config() const { return cfg_; }

private:
    bool valid_call(wire::PhaseBitmask call) const;
    PhaseTiming timing_of(wire::PhaseBitmask phases) const;
    void start_yellow(TimePoint at);
    void emit(TimePoint t, std::string kind, std::optional<wire::PhaseBitmask> call = {},
              std::optional<CallResult> result = {});

    RingBarrierConfig cfg_;
    TimePoint now_;
    EnginePhase engine_ = EnginePhase::Resting;
    wire::PhaseBitmask active_;
    wire::PhaseBitmask target_;    // incoming greens, valid during Yellow/AllRed
    wire::PhaseBitmask clearing_;  // terminating greens, valid during Yellow/AllRed
    std::optional<wire::PhaseBitmask> pending_;
    TimePoint interval_start_;   // start of the current engine interval
    TimePoint green_start_;
    FaultMode fault_ = FaultMode::Normal;
    std::vector<ControllerEvent> events_;
    std::function<void(const ControllerEvent&)> listener_;
};

}  // namespace phasebridge::controller
