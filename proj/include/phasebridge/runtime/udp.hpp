/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <netinet/in.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasebridge/runtime/clock.hpp"

namespace phasebridge {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    std::string str() const { return host + ":" + std::to_string(port); }
};

/// Parses "host:port" or a bare port.
Endpoint parse_endpoint(const std::string& text, const std::string& default_host = "127.0.0.1");

struct Datagram {
    std::vector<std::uint8_t> bytes;
    sockaddr_in from{};
};

/// IPv4 UDP socket. Move-only; closes on destruction.
class UdpSocket {
public:
    /// Throws std::system_error when the address is taken.
    static UdpSocket bind(const Endpoint& local);
    /// Ephemeral local port, default peer set to `remote`.
    static UdpSocket connect(const Endpoint& remote);

    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&& other) noexcept;
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;
    ~UdpSocket();

    bool send(std::span<const std::uint8_t> bytes);
    bool send_to(std::span<const std::uint8_t> bytes, const sockaddr_in& to);
    bool send_text(const std::string& line) {
        return send(std::span{reinterpret_cast<const std::uint8_t*>(line.data()), line.size()});
    }
    /// Waits up to `timeout` for one datagram.
    std::optional<Datagram> receive(Duration timeout);

    std::uint16_t local_port() const;
    int fd() const { return fd_; }

private:
    explicit UdpSocket(int fd) : fd_(fd) {}
    int fd_ = -1;
};

sockaddr_in resolve(const Endpoint& ep);

/// Sends one text line to a control port and waits for the one-line answer.
std::optional<std::string> udp_request(const Endpoint& remote, const std::string& line, Duration timeout);

}  // namespace phasebridge
