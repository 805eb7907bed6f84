/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/middleware/control_server.hpp"

#include <future>
#include <memory>

#include <fmt/format.h>

#include "phasebridge/core/errors.hpp"

namespace phasebridge {

MiddlewareControlServer::MiddlewareControlServer(Middleware& middleware, const Endpoint& local)
    : middleware_(middleware), socket_(UdpSocket::bind(local)) {
    thread_ = std::thread([this] { loop(); });
}

MiddlewareControlServer::~MiddlewareControlServer() { stop(); }

void MiddlewareControlServer::stop() {
    running_ = false;
    if (thread_.joinable()) thread_.join();
}

std::string MiddlewareControlServer::handle(const std::string& line) {
    if (line == "snapshot" || line == "status") return middleware_.snapshot().to_json().dump();
    if (line != "recover") return "error unknown command '" + line + "'";

    auto result = std::make_shared<std::promise<RecoverResult>>();
    auto answer = result->get_future();
    try {
        middleware_.recover([result](RecoverResult r) { result->set_value(std::move(r)); });
    } catch (const PreconditionError& e) {
        return std::string("PRECONDITION ") + e.what();
    }
    // Three status reads, each bounded by the UDP timeout, plus slack.
    const auto limit = 3 * from_seconds(middleware_.config().udp_timeout) + std::chrono::seconds(2);
    if (answer.wait_for(limit) != std::future_status::ready) return "recovery failed; still TIMEOUT (no answer)";
    auto r = answer.get();
    if (r.ok)
        return fmt::format("RECOVERED → IDLE [{},{}]", r.pair->ring1.value, r.pair->ring2.value);
    return "recovery failed; still TIMEOUT (" + r.message + ")";
}

void MiddlewareControlServer::loop() {
    while (running_) {
        auto d = socket_.receive(std::chrono::milliseconds(20));
        if (!d) continue;
        std::string line(d->bytes.begin(), d->bytes.end());
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) line.pop_back();
        auto text = handle(line) + "\n";
        socket_.send_to(std::span{reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, d->from);
    }
}

std::optional<std::string> request_recover(const Endpoint& remote, Duration timeout) {
    return udp_request(remote, "recover", timeout);
}

}  // namespace phasebridge
