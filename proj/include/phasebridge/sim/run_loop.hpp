/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasebridge/middleware/manager.hpp"
#include "phasebridge/runtime/scheduler.hpp"
#include "phasebridge/sim/agents.hpp"
#include "phasebridge/sim/traffic.hpp"

namespace phasebridge::sim {

/// How the loop waits for the next step.
class Pacer {
public:
    virtual ~Pacer() = default;
    virtual TimePoint now() const = 0;
    virtual void wait_until(TimePoint t) = 0;
    virtual bool is_virtual() const = 0;
};

/// Drives a VirtualScheduler: waiting is running every callback up to `t`.
class VirtualPacer final : public Pacer {
public:
    explicit VirtualPacer(VirtualScheduler& scheduler) : scheduler_(scheduler) {}
    TimePoint now() const override { return scheduler_.now(); }
    void wait_until(TimePoint t) override { scheduler_.run_until(t); }
    bool is_virtual() const override { return true; }

private:
    VirtualScheduler& scheduler_;
};

/// Sleeps on a wall clock.
class RealPacer final : public Pacer {
public:
    explicit RealPacer(const Clock& clock) : clock_(clock) {}
    TimePoint now() const override { return clock_.now(); }
    void wait_until(TimePoint t) override;
    bool is_virtual() const override { return false; }

private:
    const Clock& clock_;
};

struct Invocation {
    Duration sim_time{0};
    TimePoint at;
    std::string decision;
    SubmitResult result = SubmitResult::Accepted;

    nlohmann::json to_json() const;
};

struct RunHooks {
    std::function<void(TimeoutCause)> on_timeout;
    std::function<void()> on_resumed;
    /// After every traffic step.
    std::function<void(const TrafficState&)> on_step;
};

struct RunResult {
    AgentKind agent = AgentKind::Fixed;
    TrafficState traffic;
    std::vector<Invocation> invocations;
    std::int64_t steps = 0;
    std::int64_t paused_steps = 0;
    std::int64_t queue_sum_micro = 0;  // summed over steps, for the mean
    bool ended_in_timeout = false;
    std::optional<TimeoutCause> cause;

    double mean_queue() const;
    /// Deterministic summary: nothing here depends on wall time.
    nlohmann::json metrics() const;
};

/// Closed loop: agent -> middleware -> controller -> cached signal -> traffic.
/// Interval agents decide every control_interval of sim time; the duration
/// agent decides at every step boundary where the manager is IDLE.
/// In virtual time a TIMEOUT ends the run; in wall-clock time stepping pauses
/// until the manager is recovered or the duration runs out.
RunResult run_loop(const ScenarioConfig& scenario, const RingBarrierConfig& intersection, AgentKind agent,
                   Middleware& middleware, Pacer& pacer, const RunHooks& hooks = {},
                   std::ostream* harness_log = nullptr);

}  // namespace phasebridge::sim
