/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasebridge/core/action.hpp"
#include "phasebridge/middleware/event_log.hpp"

namespace phasebridge {

struct LatencyStats {
    std::size_t count = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;  // sample std, 0 below two samples
    double min_ms = 0.0;
    double max_ms = 0.0;
};

struct LatencyTable {
    std::map<ActionKind, LatencyStats> by_kind;
    std::map<ActionKind, std::vector<double>> samples_ms;
    std::size_t unmatched = 0;

    nlohmann::json to_json() const;
    /// N / mean / std columns, one row per action kind.
    std::string format() const;
};

/// ACTION_OUT -> DISPATCHED per command, grouped by action kind. Events are
/// paired by their "cmd" id; an ACTION_OUT that never dispatched, or a
/// DISPATCHED with no ACTION_OUT, counts as unmatched.
LatencyTable internal_latency(const std::vector<EventRecord>& records);

struct LoadedLog {
    std::vector<EventRecord> records;
    std::size_t skipped_lines = 0;
};

/// Reads a JSONL event log. Lines that do not parse are skipped and counted.
LoadedLog read_event_log(const std::filesystem::path& path);

/// Every event of one command, in log order.
struct CommandTrace {
    std::uint64_t cmd = 0;
    std::optional<ActionKind> kind;
    std::optional<PhasePair> pair;
    std::vector<EventKind> sequence;
    std::vector<TimePoint> times;  // parallel to sequence
    std::optional<TimePoint> action_out;
    std::optional<TimePoint> dispatched;
    std::optional<TimePoint> set_acked;
    std::optional<TimePoint> verify_match;
    std::optional<TimePoint> released;
    std::optional<TimePoint> timed_out;
    int verify_polls = 0;

    /// Released minus dispatched.
    std::optional<Duration> hold() const;
    /// ACTION_OUT, CONVERTED, DISPATCHED, at least one VERIFY_POLL, VERIFY_MATCH,
    /// HOLD_RELEASED, ignoring SET_* acknowledgements.
    bool nominal_order() const;
};

/// Commands that reached DISPATCHED, ordered by command id.
std::vector<CommandTrace> command_traces(const std::vector<EventRecord>& records);

nlohmann::json to_json(const CommandTrace& trace);

}  // namespace phasebridge
