/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/wire/codec.hpp"

#include <bit>
#include <string>

namespace phasebridge::wire {

std::string_view to_string(DecodeError e) {
    switch (e) {
        case DecodeError::Truncated: return "TRUNCATED";
        case DecodeError::BadVersion: return "BAD_VERSION";
        case DecodeError::LengthMismatch: return "LENGTH_MISMATCH";
        case DecodeError::BadType: return "BAD_TYPE";
    }
    return "?";
}

std::string_view to_string(MsgType t) {
    switch (t) {
        case MsgType::Get: return "GET";
        case MsgType::Set: return "SET";
        case MsgType::GetResponse: return "GET_RESPONSE";
        case MsgType::SetResponse: return "SET_RESPONSE";
        case MsgType::Error: return "ERROR";
    }
    return "?";
}

std::vector<std::uint8_t> encode(const WireMessage& msg) {
    if (msg.payload.size() > kMaxPayload)
        throw EncodeError("payload of " + std::to_string(msg.payload.size()) + " bytes exceeds " +
                          std::to_string(kMaxPayload));
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + msg.payload.size());
    out.push_back(msg.version);
    out.push_back(static_cast<std::uint8_t>(msg.type));
    out.push_back(static_cast<std::uint8_t>(msg.request_id >> 8));
    out.push_back(static_cast<std::uint8_t>(msg.request_id & 0xFF));
    out.push_back(msg.object_id);
    out.push_back(static_cast<std::uint8_t>(msg.payload.size()));
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

namespace {

bool known_type(std::uint8_t b) {
    switch (static_cast<MsgType>(b)) {
        case MsgType::Get:
        case MsgType::Set:
        case MsgType::GetResponse:
        case MsgType::SetResponse:
        case MsgType::Error: return true;
    }
    return false;
}

}  // namespace

std::variant<WireMessage, DecodeError> decode(std::span<const std::uint8_t> bytes) {
    // Version is checked as soon as it is present so a foreign frame is
    // reported as such even when it is also short.
    if (!bytes.empty() && bytes[0] != kVersion) return DecodeError::BadVersion;
    if (bytes.size() < kHeaderSize) return DecodeError::Truncated;
    if (!known_type(bytes[1])) return DecodeError::BadType;
    std::size_t len = bytes[5];
    if (bytes.size() < kHeaderSize + len) return DecodeError::Truncated;
    if (bytes.size() > kHeaderSize + len) return DecodeError::LengthMismatch;

    WireMessage msg;
    msg.version = bytes[0];
    msg.type = static_cast<MsgType>(bytes[1]);
    msg.request_id = static_cast<std::uint16_t>((bytes[2] << 8) | bytes[3]);
    msg.object_id = bytes[4];
    msg.payload.assign(bytes.begin() + kHeaderSize, bytes.end());
    return msg;
}

int PhaseBitmask::count() const { return std::popcount(bits); }

PhaseBitmask pair_to_mask(const PhasePair& pair) {
    PhaseId both[] = {pair.ring1, pair.ring2};
    return phases_to_mask(both);
}

PhaseBitmask phases_to_mask(std::span<const PhaseId> phases) {
    PhaseBitmask m;
    for (auto id : phases) {
        if (id.value < 1 || id.value > kMaxPhaseId) throw ConfigError("phase id " + std::to_string(id.value) + " out of range");
        m.bits |= static_cast<std::uint8_t>(1u << (id.value - 1));
    }
    return m;
}

std::vector<PhaseId> mask_to_phases(PhaseBitmask mask) {
    std::vector<PhaseId> out;
    for (int n = 1; n <= kMaxPhaseId; ++n)
        if ((mask.bits >> (n - 1)) & 1u) out.push_back(PhaseId{n});
    return out;
}

}  // namespace phasebridge::wire
