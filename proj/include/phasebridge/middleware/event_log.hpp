/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phasebridge/runtime/clock.hpp"

namespace phasebridge {

enum class EventKind {
    ActionOut,
    Converted,
    Dispatched,
    SetAcked,
    SetRejected,
    SetTimeout,
    VerifyPoll,
    VerifyMatch,
    HoldReleased,
    Dropped,
    ConflictRejected,
    TimeoutSet,
    Recovered,
    PollOk,
    PollTimeout,
    Drift,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

struct EventRecord {
    TimePoint t;
    EventKind kind;
    nlohmann::json detail = nlohmann::json::object();

    /// {"t": seconds, "event": NAME, ...detail}
    nlohmann::json to_json() const;
    static std::optional<EventRecord> from_json(const nlohmann::json& j);
};

/// Append-only middleware event log. Records are stamped under the log's
/// lock, so timestamps are monotone in log order even with several writers.
class EventLog {
public:
    explicit EventLog(const Clock& clock) : clock_(clock) {}

    void open(const std::filesystem::path& path);
    /// Keep records in memory (default on).
    void retain(bool keep) { retain_ = keep; }

    TimePoint emit(EventKind kind, nlohmann::json detail = nlohmann::json::object());

    std::vector<EventRecord> records() const;
    std::size_t count(EventKind kind) const;
    void on_record(std::function<void(const EventRecord&)> fn);

private:
    const Clock& clock_;
    mutable std::mutex mu_;
    std::vector<EventRecord> records_;
    std::ofstream file_;
    bool retain_ = true;
    std::function<void(const EventRecord&)> listener_;
};

}  // namespace phasebridge
