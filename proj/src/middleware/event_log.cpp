/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/middleware/event_log.hpp"

#include <algorithm>
#include <array>

#include "phasebridge/core/errors.hpp"

namespace phasebridge {

namespace {

constexpr std::array kNames = {
    std::pair{EventKind::ActionOut, "ACTION_OUT"},
    std::pair{EventKind::Converted, "CONVERTED"},
    std::pair{EventKind::Dispatched, "DISPATCHED"},
    std::pair{EventKind::SetAcked, "SET_ACKED"},
    std::pair{EventKind::SetRejected, "SET_REJECTED"},
    std::pair{EventKind::SetTimeout, "SET_TIMEOUT"},
    std::pair{EventKind::VerifyPoll, "VERIFY_POLL"},
    std::pair{EventKind::VerifyMatch, "VERIFY_MATCH"},
    std::pair{EventKind::HoldReleased, "HOLD_RELEASED"},
    std::pair{EventKind::Dropped, "DROPPED"},
    std::pair{EventKind::ConflictRejected, "CONFLICT_REJECTED"},
    std::pair{EventKind::TimeoutSet, "TIMEOUT_SET"},
    std::pair{EventKind::Recovered, "RECOVERED"},
    std::pair{EventKind::PollOk, "POLL_OK"},
    std::pair{EventKind::PollTimeout, "POLL_TIMEOUT"},
    std::pair{EventKind::Drift, "DRIFT"},
};

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (name == n) return k;
    return std::nullopt;
}

nlohmann::json EventRecord::to_json() const {
    nlohmann::json j{{"t", to_seconds(t)}, {"event", to_string(kind)}};
    for (const auto& [key, value] : detail.items()) j[key] = value;
    return j;
}

std::optional<EventRecord> EventRecord::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("t") || !j.contains("event")) return std::nullopt;
    if (!j["t"].is_number() || !j["event"].is_string()) return std::nullopt;
    auto kind = event_kind_from_string(j["event"].get<std::string>());
    if (!kind) return std::nullopt;
    EventRecord r{at_seconds(j["t"].get<double>()), *kind, nlohmann::json::object()};
    for (const auto& [key, value] : j.items())
        if (key != "t" && key != "event") r.detail[key] = value;
    return r;
}

void EventLog::open(const std::filesystem::path& path) {
    std::lock_guard lock(mu_);
    file_.open(path, std::ios::trunc);
    if (!file_) throw ConfigError("cannot write " + path.string());
}

TimePoint EventLog::emit(EventKind kind, nlohmann::json detail) {
    std::unique_lock lock(mu_);
    EventRecord rec{clock_.now(), kind, std::move(detail)};
    if (file_.is_open()) file_ << rec.to_json().dump() << std::endl;
    auto listener = listener_;
    if (retain_) records_.push_back(rec);
    lock.unlock();
    if (listener) listener(rec);
    return rec.t;
}

std::vector<EventRecord> EventLog::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t EventLog::count(EventKind kind) const {
    std::lock_guard lock(mu_);
    return static_cast<std::size_t>(
        std::count_if(records_.begin(), records_.end(), [kind](const EventRecord& r) { return r.kind == kind; }));
}

void EventLog::on_record(std::function<void(const EventRecord&)> fn) {
    std::lock_guard lock(mu_);
    listener_ = std::move(fn);
}

}  // namespace phasebridge
