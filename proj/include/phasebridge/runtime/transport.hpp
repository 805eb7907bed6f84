/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "phasebridge/runtime/scheduler.hpp"
#include "phasebridge/runtime/udp.hpp"

namespace phasebridge {

using Bytes = std::vector<std::uint8_t>;

/// Unreliable datagram link to one peer. Received datagrams are delivered on
/// the scheduler the transport was built with.
class DatagramTransport {
public:
    using Handler = std::function<void(Bytes)>;

    virtual ~DatagramTransport() = default;
    /// False when the datagram could not be handed to the network at all.
    virtual bool send(std::span<const std::uint8_t> bytes) = 0;
    virtual void on_receive(Handler handler) = 0;
};

/// UDP client socket with a background receive thread.
class UdpTransport final : public DatagramTransport {
public:
    UdpTransport(Scheduler& scheduler, const Endpoint& remote);
    ~UdpTransport() override;

    bool send(std::span<const std::uint8_t> bytes) override;
    void on_receive(Handler handler) override;
    void close();

private:
    void receive_loop();

    Scheduler& scheduler_;
    UdpSocket socket_;
    std::mutex mu_;
    Handler handler_;
    std::atomic<bool> running_{true};
    std::thread receiver_;
};

/// In-process link to a datagram server function, with a fixed one-way delay
/// in scheduler time. Used for virtual-clock runs.
class LoopbackTransport final : public DatagramTransport {
public:
    using Server = std::function<std::optional<Bytes>(std::span<const std::uint8_t>)>;

    LoopbackTransport(Scheduler& scheduler, Server server, Duration one_way_delay);

    bool send(std::span<const std::uint8_t> bytes) override;
    void on_receive(Handler handler) override { handler_ = std::move(handler); }

    std::uint64_t sent() const { return sent_; }
    /// Makes every later send() report failure; for fault tests.
    void fail_sends(bool fail) { fail_sends_ = fail; }

private:
    Scheduler& scheduler_;
    Server server_;
    Duration delay_;
    Handler handler_;
    std::uint64_t sent_ = 0;
    bool fail_sends_ = false;
};

}  // namespace phasebridge
