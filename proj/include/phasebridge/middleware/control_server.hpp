/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <string>
#include <thread>

#include "phasebridge/middleware/manager.hpp"
#include "phasebridge/runtime/udp.hpp"

namespace phasebridge {

/// Text control port of a running middleware. One request line, one reply:
///   recover   -> "RECOVERED -> IDLE [r1,r2]" | "PRECONDITION ..." | "recovery failed; still TIMEOUT ..."
///   snapshot  -> ManagerSnapshot as JSON
/// Only for wall-clock schedulers: requests are served from a separate thread.
class MiddlewareControlServer {
public:
    MiddlewareControlServer(Middleware& middleware, const Endpoint& local);
    ~MiddlewareControlServer();
    MiddlewareControlServer(const MiddlewareControlServer&) = delete;
    MiddlewareControlServer& operator=(const MiddlewareControlServer&) = delete;

    std::uint16_t port() const { return socket_.local_port(); }
    void stop();

    /// The reply for one request line; blocks while a recovery read is running.
    std::string handle(const std::string& line);

private:
    void loop();

    Middleware& middleware_;
    UdpSocket socket_;
    std::atomic<bool> running_{true};
    std::thread thread_;
};

/// Client side of the recover command: sends "recover" and returns the reply.
std::optional<std::string> request_recover(const Endpoint& remote, Duration timeout);

}  // namespace phasebridge
