/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/runtime/transport.hpp"

namespace phasebridge {

UdpTransport::UdpTransport(Scheduler& scheduler, const Endpoint& remote)
    : scheduler_(scheduler), socket_(UdpSocket::connect(remote)), receiver_([this] { receive_loop(); }) {}

UdpTransport::~UdpTransport() { close(); }

void UdpTransport::close() {
    running_ = false;
    if (receiver_.joinable()) receiver_.join();
}

bool UdpTransport::send(std::span<const std::uint8_t> bytes) { return socket_.send(bytes); }

void UdpTransport::on_receive(Handler handler) {
    std::lock_guard lock(mu_);
    handler_ = std::move(handler);
}

void UdpTransport::receive_loop() {
    while (running_) {
        auto d = socket_.receive(std::chrono::milliseconds(20));
        if (!d) continue;
        std::lock_guard lock(mu_);
        if (!handler_) continue;
        scheduler_.post([h = handler_, bytes = std::move(d->bytes)]() mutable { h(std::move(bytes)); });
    }
}

LoopbackTransport::LoopbackTransport(Scheduler& scheduler, Server server, Duration one_way_delay)
    : scheduler_(scheduler), server_(std::move(server)), delay_(one_way_delay) {}

bool LoopbackTransport::send(std::span<const std::uint8_t> bytes) {
    if (fail_sends_) return false;
    ++sent_;
    scheduler_.schedule_after(delay_, [this, request = Bytes(bytes.begin(), bytes.end())] {
        auto reply = server_(request);
        if (!reply) return;
        scheduler_.schedule_after(delay_, [this, reply = std::move(*reply)]() mutable {
            if (handler_) handler_(std::move(reply));
        });
    });
    return true;
}

}  // namespace phasebridge
