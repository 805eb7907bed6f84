/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>

#include "phasebridge/runtime/scheduler.hpp"
#include "phasebridge/runtime/transport.hpp"
#include "phasebridge/wire/codec.hpp"

namespace phasebridge {

/// Red, yellow and green status groups from one status read.
struct StatusGroups {
    wire::PhaseBitmask red;
    wire::PhaseBitmask yellow;
    wire::PhaseBitmask green;
};

enum class SetOutcome { Acked, Rejected, TimedOut };

/// Communication layer: GET/SET over a datagram transport. Requests are
/// correlated by request id; a reply with an unknown id or that fails to
/// decode is ignored, so the request it was meant for times out.
/// Completion callbacks run on the scheduler.
class NtcipClient {
public:
    NtcipClient(Scheduler& scheduler, DatagramTransport& transport, Duration timeout);
    NtcipClient(const NtcipClient&) = delete;
    NtcipClient& operator=(const NtcipClient&) = delete;

    using GetCallback = std::function<void(std::optional<wire::PhaseBitmask>)>;
    using SetCallback = std::function<void(SetOutcome)>;
    using StatusCallback = std::function<void(std::optional<StatusGroups>)>;

    void get(std::uint8_t object_id, GetCallback done);

    /// Sends a vehicle call. Returns false, without invoking `done`, when the
    /// transport refuses the datagram.
    bool set_call(wire::PhaseBitmask call, SetCallback done);

    /// GET red, then yellow, then green, each with its own timeout. Every GET
    /// is attempted even after an earlier one timed out; the read fails if any did.
    void read_status(StatusCallback done);

    Duration timeout() const { return timeout_; }
    std::size_t outstanding() const;
    std::uint64_t ignored_replies() const;

private:
    struct Pending {
        wire::MsgType expect;
        std::uint8_t object_id;
        TimerId timer;
        std::function<void(std::optional<wire::WireMessage>)> done;
    };

    std::uint16_t send_request(wire::WireMessage msg, std::function<void(std::optional<wire::WireMessage>)> done,
                               bool& sent);
    void on_datagram(Bytes bytes);
    void expire(std::uint16_t id);

    Scheduler& scheduler_;
    DatagramTransport& transport_;
    Duration timeout_;
    mutable std::mutex mu_;
    std::map<std::uint16_t, Pending> pending_;
    std::uint16_t next_id_ = 1;
    std::uint64_t ignored_ = 0;
};

}  // namespace phasebridge
