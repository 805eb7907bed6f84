/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "phasebridge/core/action.hpp"
#include "phasebridge/core/ring_barrier.hpp"
#include "phasebridge/middleware/event_log.hpp"
#include "phasebridge/middleware/ntcip_client.hpp"
#include "phasebridge/middleware/signal_cache.hpp"
#include "phasebridge/runtime/scheduler.hpp"

namespace phasebridge {

/// Middleware tuning, seconds unless noted.
struct MiddlewareConfig {
    double poll_hz = 10.0;
    double udp_timeout = 1.0;
    double transition_timeout = 10.0;
    int n_timeout = 5;
    int n_drift = 5;
    double verify_interval = 0.1;
    // Read from configuration and reported, but has no behaviour attached.
    double lock_window = 5.0;

    Duration poll_period() const { return from_seconds(1.0 / poll_hz); }
    /// Throws ConfigError.
    void validate() const;
};

MiddlewareConfig middleware_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MiddlewareConfig& cfg);

enum class Mode { Idle, OnHold, Timeout };
enum class TimeoutCause { CommFailure, TransitionTimeout, SimDrift };
enum class SubmitResult { Accepted, Dropped, ConflictRejected, InTimeout };

std::string_view to_string(Mode m);
std::string_view to_string(TimeoutCause c);
std::string_view to_string(SubmitResult r);

struct ManagerSnapshot {
    bool started = false;
    Mode mode = Mode::Idle;
    PhasePair current_pair;
    std::optional<PhasePair> target;
    std::optional<TimePoint> hold_deadline;
    std::optional<TimeoutCause> timeout_cause;
    std::optional<SignalState> signal;
    int consecutive_poll_timeouts = 0;
    int consecutive_drifts = 0;

    nlohmann::json to_json() const;
};

struct RecoverResult {
    bool ok = false;
    Mode mode = Mode::Timeout;
    std::optional<PhasePair> pair;
    std::string message;
};

/// The manager: command state model (IDLE / ON_HOLD / TIMEOUT), action
/// conversion with conflict check, transition verification, duration hold,
/// background status polling into a shared cache, and error detection with
/// manual recovery.
///
/// Timers and network completions run on `scheduler`; submit_action(),
/// report_step_duration(), snapshot() and recover() may be called from any
/// thread. All manager state sits behind one mutex.
class Middleware {
public:
    Middleware(RingBarrierConfig intersection, MiddlewareConfig cfg, Scheduler& scheduler,
               DatagramTransport& transport, EventLog& log);
    ~Middleware();
    Middleware(const Middleware&) = delete;
    Middleware& operator=(const Middleware&) = delete;

    /// Reads the controller once to learn the pair being served, then starts
    /// polling. `ready(true)` once IDLE; `ready(false)` if the controller did
    /// not answer, in which case the manager is left in TIMEOUT (comm failure).
    void start(std::function<void(bool)> ready = {});
    /// Cancels the poller and any verification. Idempotent.
    void stop();

    /// Never blocks on the network. Throws ValidationError / SequenceError for
    /// malformed actions and PreconditionError before start() completes.
    SubmitResult submit_action(const Action& action);

    /// Once per simulation step. Returns the cause when this call moved the
    /// manager to TIMEOUT.
    std::optional<TimeoutCause> report_step_duration(Duration elapsed, Duration step_length);

    /// Asynchronous re-read of the controller. Throws PreconditionError when
    /// the manager is not in TIMEOUT.
    void recover(std::function<void(RecoverResult)> done);

    ManagerSnapshot snapshot() const;
    const SignalCache& cache() const { return cache_; }
    const MiddlewareConfig& config() const { return cfg_; }
    const RingBarrierConfig& intersection() const { return intersection_; }
    NtcipClient& client() { return client_; }

private:
    struct Command {
        std::uint64_t id = 0;
        ActionKind kind = ActionKind::Selection;
        UnifiedCommand cmd;
        TimePoint dispatched_at;
        int ticks = 0;
        bool matched = false;
    };

    void initial_read(TimePoint began, std::function<void(bool)> ready);
    void poll_tick(std::uint64_t generation);
    void on_poll(std::optional<StatusGroups> groups, std::uint64_t generation);
    void verify_tick(std::uint64_t command_id);
    void release(std::uint64_t command_id);
    void on_set_outcome(std::uint64_t command_id, SetOutcome outcome);

    // Callers hold mu_.
    void start_polling();
    void release_locked();
    void enter_timeout(TimeoutCause cause);
    void publish(const StatusGroups& groups);
    void schedule_poll(TimePoint at);
    std::optional<PhasePair> pair_from_greens(wire::PhaseBitmask greens) const;

    RingBarrierConfig intersection_;
    MiddlewareConfig cfg_;
    Scheduler& scheduler_;
    EventLog& log_;
    NtcipClient client_;
    SignalCache cache_;

    mutable std::mutex mu_;
    bool started_ = false;
    bool stopped_ = false;
    bool recovering_ = false;
    Mode mode_ = Mode::Idle;
    PhasePair current_pair_;
    std::optional<Command> command_;
    std::optional<TimePoint> hold_deadline_;
    std::optional<TimeoutCause> cause_;
    int poll_timeouts_ = 0;
    int drifts_ = 0;
    std::uint64_t next_command_id_ = 1;
    std::uint64_t poll_seq_ = 0;
    std::uint64_t poll_generation_ = 0;
    TimePoint next_poll_at_{};
    TimerId poll_timer_ = 0;
    TimerId verify_timer_ = 0;
};

}  // namespace phasebridge
