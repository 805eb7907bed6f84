/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/controller/controller_service.hpp"

#include <future>
#include <sstream>

namespace phasebridge::controller {

ControllerService::ControllerService(Scheduler& scheduler, VirtualController& controller)
    : scheduler_(scheduler), controller_(controller) {
    rearm();
}

std::optional<Bytes> ControllerService::handle(std::span<const std::uint8_t> bytes) {
    auto reply = controller_.handle_datagram(bytes, scheduler_.now());
    rearm();
    return reply;
}

void ControllerService::set_fault_mode(FaultMode mode) {
    controller_.set_fault_mode(mode, scheduler_.now());
    rearm();
}

void ControllerService::log_to(const std::filesystem::path& path) {
    log_ = std::make_shared<std::ofstream>(path, std::ios::trunc);
    if (!*log_) throw ConfigError("cannot write " + path.string());
    for (const auto& e : controller_.events()) *log_ << e.to_json().dump() << '\n';
    log_->flush();
    controller_.on_event([log = log_](const ControllerEvent& e) { *log << e.to_json().dump() << std::endl; });
}

void ControllerService::rearm() {
    auto next = controller_.next_deadline();
    if (next == armed_for_) return;
    if (wake_ != 0) scheduler_.cancel(wake_);
    wake_ = 0;
    armed_for_ = next;
    if (!next) return;
    wake_ = scheduler_.schedule_at(*next, [this, at = *next] {
        wake_ = 0;
        armed_for_.reset();
        controller_.advance_to(at);
        rearm();
    });
}

UdpControllerServer::UdpControllerServer(Scheduler& scheduler, ControllerService& service, const Endpoint& data,
                                         std::optional<Endpoint> control)
    : scheduler_(scheduler), service_(service), data_(UdpSocket::bind(data)) {
    if (control) control_.emplace(UdpSocket::bind(*control));
    data_thread_ = std::thread([this] { data_loop(); });
    if (control_) control_thread_ = std::thread([this] { control_loop(); });
}

UdpControllerServer::~UdpControllerServer() { stop(); }

std::optional<std::uint16_t> UdpControllerServer::control_port() const {
    if (!control_) return std::nullopt;
    return control_->local_port();
}

void UdpControllerServer::stop() {
    running_ = false;
    if (data_thread_.joinable()) data_thread_.join();
    if (control_thread_.joinable()) control_thread_.join();
}

void UdpControllerServer::data_loop() {
    while (running_) {
        auto d = data_.receive(std::chrono::milliseconds(20));
        if (!d) continue;
        scheduler_.post([this, d = std::move(*d)] {
            auto reply = service_.handle(d.bytes);
            if (reply) data_.send_to(*reply, d.from);
        });
    }
}

void UdpControllerServer::control_loop() {
    while (running_) {
        auto d = control_->receive(std::chrono::milliseconds(20));
        if (!d) continue;
        std::string line(d->bytes.begin(), d->bytes.end());
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();

        auto reply = std::make_shared<std::promise<std::string>>();
        auto answer = reply->get_future();
        scheduler_.post([this, line, reply] {
            std::istringstream in(line);
            std::string verb, arg;
            in >> verb >> arg;
            try {
                if (verb == "fault") {
                    service_.set_fault_mode(fault_mode_from_string(arg));
                    reply->set_value("ok fault " + arg);
                } else if (verb == "status") {
                    auto& c = service_.controller();
                    c.advance_to(scheduler_.now());
                    nlohmann::json j{{"engine", to_string(c.engine_phase())},
                                     {"fault", to_string(c.fault_mode())},
                                     {"greens", c.greens().bits},
                                     {"yellows", c.yellows().bits}};
                    reply->set_value(j.dump());
                } else {
                    reply->set_value("error unknown command '" + verb + "'");
                }
            } catch (const std::exception& e) {
                reply->set_value(std::string("error ") + e.what());
            }
        });
        if (answer.wait_for(std::chrono::seconds(2)) != std::future_status::ready) continue;
        auto text = answer.get() + "\n";
        control_->send_to(std::span{reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, d->from);
    }
}

}  // namespace phasebridge::controller
