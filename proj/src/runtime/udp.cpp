/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/runtime/udp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <system_error>

#include "phasebridge/core/errors.hpp"

namespace phasebridge {

Endpoint parse_endpoint(const std::string& text, const std::string& default_host) {
    Endpoint ep;
    ep.host = default_host;
    auto colon = text.rfind(':');
    std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
    if (colon != std::string::npos && colon > 0) ep.host = text.substr(0, colon);
    try {
        int p = std::stoi(port);
        if (p < 0 || p > 65535) throw std::out_of_range("port");
        ep.port = static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
        throw ConfigError("bad endpoint '" + text + "'");
    }
    return ep;
}

sockaddr_in resolve(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;

    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
        throw ConfigError("cannot resolve host '" + ep.host + "'");
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
    return addr;
}

namespace {

int open_socket() {
    int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
    if (fd < 0) throw std::system_error(errno, std::generic_category(), "socket");
    return fd;
}

}  // namespace

UdpSocket UdpSocket::bind(const Endpoint& local) {
    UdpSocket s(open_socket());
    auto addr = resolve(local);
    if (::bind(s.fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw std::system_error(errno, std::generic_category(), "bind " + local.str());
    return s;
}

UdpSocket UdpSocket::connect(const Endpoint& remote) {
    UdpSocket s(open_socket());
    auto addr = resolve(remote);
    if (::connect(s.fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw std::system_error(errno, std::generic_category(), "connect " + remote.str());
    return s;
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
}

bool UdpSocket::send(std::span<const std::uint8_t> bytes) {
    return ::send(fd_, bytes.data(), bytes.size(), 0) == static_cast<ssize_t>(bytes.size());
}

bool UdpSocket::send_to(std::span<const std::uint8_t> bytes, const sockaddr_in& to) {
    return ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&to), sizeof to) ==
           static_cast<ssize_t>(bytes.size());
}

std::optional<Datagram> UdpSocket::receive(Duration timeout) {
    pollfd pfd{fd_, POLLIN, 0};
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(timeout).count();
    int rc = ::poll(&pfd, 1, static_cast<int>(ms));
    if (rc <= 0 || !(pfd.revents & POLLIN)) return std::nullopt;

    Datagram d;
    d.bytes.resize(65536);
    socklen_t len = sizeof d.from;
    ssize_t n = ::recvfrom(fd_, d.bytes.data(), d.bytes.size(), 0, reinterpret_cast<sockaddr*>(&d.from), &len);
    // ECONNREFUSED surfaces here on a connected socket when the peer port is closed.
    if (n < 0) return std::nullopt;
    d.bytes.resize(static_cast<std::size_t>(n));
    return d;
}

std::uint16_t UdpSocket::local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
}

std::optional<std::string> udp_request(const Endpoint& remote, const std::string& line, Duration timeout) {
    auto sock = UdpSocket::connect(remote);
    if (!sock.send_text(line)) return std::nullopt;
    auto d = sock.receive(timeout);
    if (!d) return std::nullopt;
    std::string text(d->bytes.begin(), d->bytes.end());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
}

}  // namespace phasebridge
