/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/sim/run_loop.hpp"

#include <thread>

namespace phasebridge::sim {

using nlohmann::json;

void RealPacer::wait_until(TimePoint t) {
    const auto left = t - clock_.now();
    if (left > Duration::zero()) std::this_thread::sleep_for(left);
}

json Invocation::to_json() const {
    return {{"t", to_seconds(sim_time)}, {"decision", decision}, {"result", to_string(result)}};
}

double RunResult::mean_queue() const {
    if (steps == 0) return 0.0;
    return static_cast<double>(queue_sum_micro) / static_cast<double>(steps) / kMicro;
}

json RunResult::metrics() const {
    auto veh = [](std::int64_t micro) { return static_cast<double>(micro) / kMicro; };
    json per_phase = json::object();
    for (int p = 1; p <= kMaxPhaseId; ++p) {
        const auto i = static_cast<std::size_t>(p - 1);
        per_phase[std::to_string(p)] = {
            {"arrived", veh(traffic.arrived[i])}, {"departed", veh(traffic.departed[i])}, {"queue", veh(traffic.queue[i])}};
    }
    std::map<std::string, int> decisions;
    std::map<std::string, int> results;
    for (const auto& inv : invocations) {
        ++decisions[inv.decision];
        ++results[std::string(to_string(inv.result))];
    }
    return {{"agent", to_string(agent)},
            {"steps", steps},
            {"paused_steps", paused_steps},
            {"sim_time", to_seconds(traffic.sim_time)},
            {"total_arrivals", veh(traffic.total_arrived())},
            {"total_departures", veh(traffic.total_departed())},
            {"final_queue", veh(traffic.total_queue())},
            {"mean_queue", mean_queue()},
            {"per_phase", per_phase},
            {"invocations", invocations.size()},
            {"decisions", decisions},
            {"submissions", results},
            {"ended_in_timeout", ended_in_timeout},
            {"timeout_cause", cause ? json(to_string(*cause)) : json(nullptr)}};
}

RunResult run_loop(const ScenarioConfig& scenario, const RingBarrierConfig& intersection, AgentKind agent,
                   Middleware& middleware, Pacer& pacer, const RunHooks& hooks, std::ostream* harness_log) {
    RunResult result;
    result.agent = agent;
    result.traffic = TrafficState::initial(scenario);

    const Duration step_length = scenario.step();
    const std::int64_t total = scenario.total_steps();
    const std::int64_t interval = scenario.steps_per_interval();
    const TimePoint origin = pacer.now();
    bool paused = false;

    for (std::int64_t k = 0; k < total; ++k) {
        const TimePoint step_start = origin + k * step_length;
        pacer.wait_until(step_start);

        auto snap = middleware.snapshot();
        if (snap.mode == Mode::Timeout) {
            if (!paused && hooks.on_timeout && snap.timeout_cause) hooks.on_timeout(*snap.timeout_cause);
            paused = true;
            result.cause = snap.timeout_cause;
            if (pacer.is_virtual()) {
                result.ended_in_timeout = true;
                return result;
            }
            ++result.paused_steps;
            continue;
        }
        if (paused) {
            paused = false;
            if (hooks.on_resumed) hooks.on_resumed();
        }

        const bool due = runs_on_interval(agent) ? (result.steps % interval == 0) : snap.mode == Mode::Idle;
        if (due) {
            Action action = decide(agent, result.traffic, snap.current_pair, intersection);
            Invocation inv{result.traffic.sim_time, pacer.now(), decision_label(action), SubmitResult::Accepted};
            inv.result = middleware.submit_action(action);
            if (harness_log) {
                json line = inv.to_json();
                line["agent"] = to_string(agent);
                *harness_log << line.dump() << '\n';
            }
            result.invocations.push_back(std::move(inv));
        }

        const auto signal = middleware.cache().load().value_or(SignalState{});
        result.traffic = step(result.traffic, signal, scenario);
        ++result.steps;
        result.queue_sum_micro += result.traffic.total_queue();
        if (hooks.on_step) hooks.on_step(result.traffic);

        if (middleware.report_step_duration(pacer.now() - step_start, step_length) && pacer.is_virtual()) {
            result.cause = TimeoutCause::SimDrift;
            result.ended_in_timeout = true;
            return result;
        }
    }
    pacer.wait_until(origin + total * step_length);

    auto final_snap = middleware.snapshot();
    if (final_snap.mode == Mode::Timeout) {
        result.ended_in_timeout = true;
        result.cause = final_snap.timeout_cause;
    }
    return result;
}

}  // namespace phasebridge::sim
