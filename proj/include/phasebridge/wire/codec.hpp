/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Datagram framing for the controller link.
 *
 *   byte 0      version (0x01)
 *   byte 1      message type
 *   bytes 2-3   request id, big-endian
 *   byte 4      object id
 *   byte 5      payload length L
 *   bytes 6..   payload (L bytes)
 *
 * One object per message. Responses echo the request id.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "phasebridge/core/errors.hpp"
#include "phasebridge/core/ring_barrier.hpp"

namespace phasebridge::wire {

inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 6;
inline constexpr std::size_t kMaxPayload = 255;

enum class MsgType : std::uint8_t {
    Get = 0x01,
    Set = 0x02,
    GetResponse = 0x81,
    SetResponse = 0x82,
    Error = 0xFF,
};

// Object ids are kept as raw bytes on the wire so unknown ids still decode;
// these are the ones the controller understands.
namespace object {
inline constexpr std::uint8_t kStatusRed = 0x01;
inline constexpr std::uint8_t kStatusYellow = 0x02;
inline constexpr std::uint8_t kStatusGreen = 0x03;
inline constexpr std::uint8_t kVehCall = 0x10;
}  // namespace object

// Payload byte of an ERROR message.
namespace error_code {
inline constexpr std::uint8_t kMalformed = 0x01;
inline constexpr std::uint8_t kUnknownObject = 0x02;
inline constexpr std::uint8_t kConflictingCall = 0x03;
inline constexpr std::uint8_t kUnsupported = 0x04;
inline constexpr std::uint8_t kCallsDisabled = 0x05;
}  // namespace error_code

struct WireMessage {
    std::uint8_t version = kVersion;
    MsgType type = MsgType::Get;
    std::uint16_t request_id = 0;
    std::uint8_t object_id = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const WireMessage&) const = default;

    static WireMessage get(std::uint16_t id, std::uint8_t obj) { return {kVersion, MsgType::Get, id, obj, {}}; }
    static WireMessage set(std::uint16_t id, std::uint8_t obj, std::uint8_t value) {
        return {kVersion, MsgType::Set, id, obj, {value}};
    }
    static WireMessage get_response(std::uint16_t id, std::uint8_t obj, std::uint8_t value) {
        return {kVersion, MsgType::GetResponse, id, obj, {value}};
    }
    static WireMessage set_response(std::uint16_t id, std::uint8_t obj, std::uint8_t value) {
        return {kVersion, MsgType::SetResponse, id, obj, {value}};
    }
    static WireMessage error(std::uint16_t id, std::uint8_t obj, std::uint8_t code) {
        return {kVersion, MsgType::Error, id, obj, {code}};
    }
};

enum class DecodeError {
    Truncated,       // shorter than the header or the declared payload
    BadVersion,      // version byte is not 0x01
    LengthMismatch,  // bytes beyond the declared payload
    BadType,         // message type byte not defined
};

std::string_view to_string(DecodeError e);
std::string_view to_string(MsgType t);

class EncodeError : public Error {
public:
    using Error::Error;
};

std::vector<std::uint8_t> encode(const WireMessage& msg);

/// Total over arbitrary input: either a message or one DecodeError.
std::variant<WireMessage, DecodeError> decode(std::span<const std::uint8_t> bytes);

/// One byte; bit (n-1) set means phase n is asserted.
struct PhaseBitmask {
    std::uint8_t bits = 0;

    bool operator==(const PhaseBitmask&) const = default;
    bool has(PhaseId id) const { return id.value >= 1 && id.value <= 8 && (bits >> (id.value - 1)) & 1u; }
    int count() const;
};

PhaseBitmask pair_to_mask(const PhasePair& pair);
PhaseBitmask phases_to_mask(std::span<const PhaseId> phases);
std::vector<PhaseId> mask_to_phases(PhaseBitmask mask);

}  // namespace phasebridge::wire
