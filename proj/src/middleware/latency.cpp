/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/middleware/latency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "phasebridge/core/errors.hpp"

namespace phasebridge {

using nlohmann::json;

namespace {

std::optional<std::uint64_t> cmd_of(const EventRecord& r) {
    auto it = r.detail.find("cmd");
    if (it == r.detail.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) return std::nullopt;
    return it->get<std::uint64_t>();
}

std::optional<ActionKind> kind_of(const EventRecord& r) {
    auto it = r.detail.find("action");
    if (it == r.detail.end() || !it->is_string()) return std::nullopt;
    try {
        return action_kind_from_string(it->get<std::string>());
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<PhasePair> pair_of_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) return std::nullopt;
    return pair_of(j[0].get<int>(), j[1].get<int>());
}

LatencyStats summarize(const std::vector<double>& xs) {
    LatencyStats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean_ms = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean_ms) * (x - s.mean_ms);
        s.std_ms = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    s.min_ms = *lo;
    s.max_ms = *hi;
    return s;
}

}  // namespace

LatencyTable internal_latency(const std::vector<EventRecord>& records) {
    struct Open {
        TimePoint t;
        ActionKind kind;
    };
    std::map<std::uint64_t, Open> outs;
    LatencyTable table;
    for (const auto& r : records) {
        auto cmd = cmd_of(r);
        if (!cmd) continue;
        if (r.kind == EventKind::ActionOut) {
            auto kind = kind_of(r);
            if (!kind) {
                ++table.unmatched;
                continue;
            }
            if (outs.contains(*cmd)) ++table.unmatched;
            outs[*cmd] = Open{r.t, *kind};
        } else if (r.kind == EventKind::Dispatched) {
            auto it = outs.find(*cmd);
            if (it == outs.end()) {
                ++table.unmatched;
                continue;
            }
            table.samples_ms[it->second.kind].push_back(to_seconds(r.t - it->second.t) * 1e3);
            outs.erase(it);
        }
    }
    table.unmatched += outs.size();
    for (const auto& [kind, xs] : table.samples_ms) table.by_kind[kind] = summarize(xs);
    return table;
}

json LatencyTable::to_json() const {
    json rows = json::object();
    for (const auto& [kind, s] : by_kind) {
        rows[std::string(phasebridge::to_string(kind))] = {
            {"n", s.count}, {"mean_ms", s.mean_ms}, {"std_ms", s.std_ms}, {"min_ms", s.min_ms}, {"max_ms", s.max_ms}};
    }
    return {{"internal_latency", rows}, {"unmatched", unmatched}};
}

std::string LatencyTable::format() const {
    std::string out = fmt::format("{:<10} {:>6} {:>12} {:>12}\n", "action", "N", "mean (ms)", "std (ms)");
    for (const auto& [kind, s] : by_kind)
        out += fmt::format("{:<10} {:>6} {:>12.4f} {:>12.4f}\n", phasebridge::to_string(kind), s.count, s.mean_ms,
                           s.std_ms);
    if (unmatched) out += fmt::format("unmatched events: {}\n", unmatched);
    return out;
}

LoadedLog read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    LoadedLog out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = json::parse(line, nullptr, false);
        auto rec = j.is_discarded() ? std::nullopt : EventRecord::from_json(j);
        if (!rec) {
            ++out.skipped_lines;
            continue;
        }
        out.records.push_back(std::move(*rec));
    }
    return out;
}

std::optional<Duration> CommandTrace::hold() const {
    if (!dispatched || !released) return std::nullopt;
    return *released - *dispatched;
}

bool CommandTrace::nominal_order() const {
    std::vector<EventKind> core;
    for (auto k : sequence)
        if (k != EventKind::SetAcked && k != EventKind::SetRejected && k != EventKind::SetTimeout) core.push_back(k);
    if (core.size() < 6) return false;
    if (core[0] != EventKind::ActionOut || core[1] != EventKind::Converted || core[2] != EventKind::Dispatched)
        return false;
    std::size_t i = 3;
    while (i < core.size() && core[i] == EventKind::VerifyPoll) ++i;
    if (i == 3) return false;
    return core.size() == i + 2 && core[i] == EventKind::VerifyMatch && core[i + 1] == EventKind::HoldReleased;
}

std::vector<CommandTrace> command_traces(const std::vector<EventRecord>& records) {
    std::map<std::uint64_t, CommandTrace> traces;
    for (const auto& r : records) {
        auto cmd = cmd_of(r);
        if (!cmd) continue;
        auto& t = traces[*cmd];
        t.cmd = *cmd;
        t.sequence.push_back(r.kind);
        t.times.push_back(r.t);
        if (auto k = kind_of(r); k && !t.kind) t.kind = k;
        if (auto it = r.detail.find("pair"); it != r.detail.end() && !t.pair) t.pair = pair_of_json(*it);
        switch (r.kind) {
            case EventKind::ActionOut: t.action_out = r.t; break;
            case EventKind::Dispatched: t.dispatched = r.t; break;
            case EventKind::SetAcked: t.set_acked = r.t; break;
            case EventKind::VerifyPoll: ++t.verify_polls; break;
            case EventKind::VerifyMatch: t.verify_match = r.t; break;
            case EventKind::HoldReleased: t.released = r.t; break;
            case EventKind::TimeoutSet: t.timed_out = r.t; break;
            default: break;
        }
    }
    std::vector<CommandTrace> out;
    for (auto& [id, t] : traces)
        if (t.dispatched) out.push_back(std::move(t));
    return out;
}

json to_json(const CommandTrace& t) {
    auto opt_t = [](const std::optional<TimePoint>& tp) { return tp ? json(to_seconds(*tp)) : json(nullptr); };
    // Event times relative to the action output, for plotting.
    const TimePoint origin = t.action_out ? *t.action_out : (t.times.empty() ? TimePoint{} : t.times.front());
    json seq = json::array();
    for (std::size_t i = 0; i < t.sequence.size(); ++i)
        seq.push_back({{"event", to_string(t.sequence[i])}, {"dt", to_seconds(t.times[i] - origin)}});
    return {{"cmd", t.cmd},
            {"action", t.kind ? json(to_string(*t.kind)) : json(nullptr)},
            {"pair", t.pair ? json::array({t.pair->ring1.value, t.pair->ring2.value}) : json(nullptr)},
            {"action_out", opt_t(t.action_out)},
            {"dispatched", opt_t(t.dispatched)},
            {"set_acked", opt_t(t.set_acked)},
            {"verify_match", opt_t(t.verify_match)},
            {"hold_released", opt_t(t.released)},
            {"timeout", opt_t(t.timed_out)},
            {"verify_polls", t.verify_polls},
            {"hold_s", t.hold() ? json(to_seconds(*t.hold())) : json(nullptr)},
            {"events", seq}};
}

}  // namespace phasebridge
