/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/controller/virtual_controller.hpp"

#include <algorithm>

namespace phasebridge::controller {

using wire::MsgType;
using wire::PhaseBitmask;
using wire::WireMessage;

std::string_view to_string(EnginePhase p) {
    switch (p) {
        case EnginePhase::Resting: return "RESTING";
        case EnginePhase::MinGreen: return "MIN_GREEN";
        case EnginePhase::Yellow: return "YELLOW";
        case EnginePhase::AllRed: return "ALL_RED";
    }
    return "?";
}

std::string_view to_string(FaultMode f) {
    switch (f) {
        case FaultMode::Normal: return "normal";
        case FaultMode::Silent: return "silent";
        case FaultMode::RejectCalls: return "reject";
    }
    return "?";
}

std::string_view to_string(CallResult r) {
    switch (r) {
        case CallResult::Accepted: return "accepted";
        case CallResult::Rejected: return "rejected";
        case CallResult::NoOp: return "no_op";
    }
    return "?";
}

FaultMode fault_mode_from_string(std::string_view name) {
    if (name == "normal") return FaultMode::Normal;
    if (name == "silent") return FaultMode::Silent;
    if (name == "reject") return FaultMode::RejectCalls;
    throw ConfigError("unknown fault mode '" + std::string(name) + "' (expected normal|silent|reject)");
}

namespace {

nlohmann::json phase_list(PhaseBitmask m) {
    auto arr = nlohmann::json::array();
    for (auto id : wire::mask_to_phases(m)) arr.push_back(id.value);
    return arr;
}

}  // namespace

nlohmann::json ControllerEvent::to_json() const {
    nlohmann::json j{{"t", to_seconds(t)},
                     {"event", kind},
                     {"greens", phase_list(greens)},
                     {"yellows", phase_list(yellows)},
                     {"reds", phase_list(reds)}};
    if (call) j["call"] = phase_list(*call);
    if (result) j["result"] = to_string(*result);
    return j;
}

VirtualController::VirtualController(RingBarrierConfig cfg, TimePoint start)
    : cfg_(std::move(cfg)), now_(start), interval_start_(start), green_start_(start) {
    if (cfg_.sequence().empty()) throw ConfigError("controller needs a non-empty phase sequence for its start state");
    active_ = wire::pair_to_mask(cfg_.sequence().front());
    emit(start, "STARTUP");
}

PhaseBitmask VirtualController::greens() const {
    return (engine_ == EnginePhase::Resting || engine_ == EnginePhase::MinGreen) ? active_ : PhaseBitmask{};
}

PhaseBitmask VirtualController::yellows() const {
    return engine_ == EnginePhase::Yellow ? active_ : PhaseBitmask{};
}

PhaseBitmask VirtualController::reds() const {
    return PhaseBitmask{static_cast<std::uint8_t>(cfg_.phase_mask() & ~(greens().bits | yellows().bits))};
}

bool VirtualController::valid_call(PhaseBitmask call) const {
    if (call.count() != 2 || (call.bits & ~cfg_.phase_mask()) != 0) return false;
    auto phases = wire::mask_to_phases(call);
    PhasePair pair{phases[0], phases[1]};
    if (cfg_.ring_of(pair.ring1) == 2) std::swap(pair.ring1, pair.ring2);
    return is_compatible(cfg_, pair);
}

PhaseTiming VirtualController::timing_of(PhaseBitmask phases) const {
    PhaseTiming t{0.0, 0.0, 0.0, 0.0};
    for (auto id : wire::mask_to_phases(phases)) {
        const auto& p = cfg_.timing(id);
        t.min_green = std::max(t.min_green, p.min_green);
        t.max_green = std::max(t.max_green, p.max_green);
        t.yellow = std::max(t.yellow, p.yellow);
        t.red_clearance = std::max(t.red_clearance, p.red_clearance);
    }
    return t;
}

std::optional<TimePoint> VirtualController::next_deadline() const {
    switch (engine_) {
        case EnginePhase::Resting: return std::nullopt;
        case EnginePhase::MinGreen: return green_start_ + from_seconds(timing_of(active_).min_green);
        case EnginePhase::Yellow: return interval_start_ + from_seconds(timing_of(clearing_).yellow);
        case EnginePhase::AllRed: return interval_start_ + from_seconds(timing_of(clearing_).red_clearance);
    }
    return std::nullopt;
}

void VirtualController::start_yellow(TimePoint at) {
    clearing_ = active_;
    target_ = *pending_;
    pending_.reset();
    engine_ = EnginePhase::Yellow;
    interval_start_ = at;
    emit(at, "YELLOW");
}

void VirtualController::advance_to(TimePoint now) {
    while (auto deadline = next_deadline()) {
        if (*deadline > now) break;
        TimePoint at = *deadline;
        switch (engine_) {
            case EnginePhase::MinGreen:
                if (pending_) {
                    start_yellow(at);
                } else {
                    engine_ = EnginePhase::Resting;
                    interval_start_ = at;
                }
                break;
            case EnginePhase::Yellow:
                active_ = PhaseBitmask{};
                engine_ = EnginePhase::AllRed;
                interval_start_ = at;
                emit(at, "ALL_RED");
                break;
            case EnginePhase::AllRed:
                active_ = target_;
                engine_ = EnginePhase::MinGreen;
                interval_start_ = at;
                green_start_ = at;
                emit(at, "GREEN");
                break;
            case EnginePhase::Resting: break;
        }
    }
    if (now > now_) now_ = now;
}

CallResult VirtualController::request_service(PhaseBitmask call, TimePoint now) {
    advance_to(now);
    CallResult result;
    if (!valid_call(call)) {
        result = CallResult::Rejected;
    } else if (engine_ == EnginePhase::Resting || engine_ == EnginePhase::MinGreen) {
        if (call == active_) {
            // Demand for what is already green supersedes any latched call.
            pending_.reset();
            result = CallResult::NoOp;
        } else {
            pending_ = call;
            result = CallResult::Accepted;
        }
    } else if (call == target_) {
        pending_.reset();
        result = CallResult::NoOp;
    } else {
        // Mid-clearance: latched and served after the incoming greens' minimum.
        pending_ = call;
        result = CallResult::Accepted;
    }
    emit(now_, "VEH_CALL", call, result);
    if (result == CallResult::Accepted && engine_ == EnginePhase::Resting) start_yellow(now_);
    return result;
}

std::optional<std::vector<std::uint8_t>> VirtualController::handle_datagram(std::span<const std::uint8_t> bytes,
                                                                             TimePoint now) {
    advance_to(now);
    if (fault_ == FaultMode::Silent) return std::nullopt;

    auto decoded = wire::decode(bytes);
    if (std::holds_alternative<wire::DecodeError>(decoded)) {
        std::uint16_t id = bytes.size() >= 4 ? static_cast<std::uint16_t>((bytes[2] << 8) | bytes[3]) : 0;
        std::uint8_t obj = bytes.size() >= 5 ? bytes[4] : 0;
        return wire::encode(WireMessage::error(id, obj, wire::error_code::kMalformed));
    }
    const auto& msg = std::get<WireMessage>(decoded);
    auto reply_error = [&](std::uint8_t code) {
        return wire::encode(WireMessage::error(msg.request_id, msg.object_id, code));
    };

    switch (msg.type) {
        case MsgType::Get: {
            if (!msg.payload.empty()) return reply_error(wire::error_code::kMalformed);
            PhaseBitmask value;
            switch (msg.object_id) {
                case wire::object::kStatusRed: value = reds(); break;
                case wire::object::kStatusYellow: value = yellows(); break;
                case wire::object::kStatusGreen: value = greens(); break;
                case wire::object::kVehCall: value = pending_.value_or(PhaseBitmask{}); break;
                default: return reply_error(wire::error_code::kUnknownObject);
            }
            return wire::encode(WireMessage::get_response(msg.request_id, msg.object_id, value.bits));
        }
        case MsgType::Set: {
            switch (msg.object_id) {
                case wire::object::kVehCall: break;
                case wire::object::kStatusRed:
                case wire::object::kStatusYellow:
                case wire::object::kStatusGreen: return reply_error(wire::error_code::kUnsupported);
                default: return reply_error(wire::error_code::kUnknownObject);
            }
            if (msg.payload.size() != 1) return reply_error(wire::error_code::kMalformed);
            PhaseBitmask call{msg.payload[0]};
            if (fault_ == FaultMode::RejectCalls) {
                emit(now_, "VEH_CALL", call, CallResult::Rejected);
                return reply_error(wire::error_code::kCallsDisabled);
            }
            if (request_service(call, now_) == CallResult::Rejected)
                return reply_error(wire::error_code::kConflictingCall);
            return wire::encode(WireMessage::set_response(msg.request_id, msg.object_id, call.bits));
        }
        default: return reply_error(wire::error_code::kUnsupported);
    }
}

void VirtualController::set_fault_mode(FaultMode mode, TimePoint now) {
    advance_to(now);
    fault_ = mode;
    emit(now_, "FAULT_" + std::string(to_string(mode)));
}

void VirtualController::emit(TimePoint t, std::string kind, std::optional<PhaseBitmask> call,
                             std::optional<CallResult> result) {
    events_.push_back({t, std::move(kind), greens(), yellows(), reds(), call, result});
    if (listener_) listener_(events_.back());
}

}  // namespace phasebridge::controller
