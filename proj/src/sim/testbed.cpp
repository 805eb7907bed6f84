/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/sim/testbed.hpp"

#include <future>

namespace phasebridge::sim {

VirtualTestbed::VirtualTestbed(const RunConfig& cfg)
    : controller_(cfg.intersection, scheduler_.now()),
      service_(scheduler_, controller_),
      transport_(
          scheduler_, [this](std::span<const std::uint8_t> bytes) { return service_.handle(bytes); },
          from_seconds(cfg.controller.loopback_delay)),
      log_(scheduler_.clock()),
      middleware_(cfg.intersection, cfg.middleware, scheduler_, transport_, log_) {
    if (cfg.controller.fault != controller::FaultMode::Normal) service_.set_fault_mode(cfg.controller.fault);
}

void VirtualTestbed::open_logs(const std::filesystem::path& dir) {
    log_.open(dir / "events.jsonl");
    service_.log_to(dir / "controller.jsonl");
}

bool VirtualTestbed::start(Duration limit) {
    std::optional<bool> ready;
    middleware_.start([&ready](bool ok) { ready = ok; });
    scheduler_.run_until([&ready] { return ready.has_value(); }, scheduler_.now() + limit);
    return ready.value_or(false);
}

RealTestbed::RealTestbed(const RunConfig& cfg, const RealOptions& options) : log_(scheduler_.clock()) {
    Endpoint remote{cfg.controller.host, options.controller_port.value_or(cfg.controller.port)};
    if (options.embedded) {
        controller_scheduler_ = std::make_unique<RealScheduler>();
        controller_ = std::make_unique<controller::VirtualController>(cfg.intersection, controller_scheduler_->now());
        service_ = std::make_unique<controller::ControllerService>(*controller_scheduler_, *controller_);
        if (cfg.controller.fault != controller::FaultMode::Normal) {
            auto fault = cfg.controller.fault;
            std::promise<void> applied;
            controller_scheduler_->post([&] {
                service_->set_fault_mode(fault);
                applied.set_value();
            });
            applied.get_future().wait();
        }
        std::optional<Endpoint> control;
        if (options.controller_control_port) control = Endpoint{"127.0.0.1", *options.controller_control_port};
        server_ = std::make_unique<controller::UdpControllerServer>(
            *controller_scheduler_, *service_, Endpoint{"127.0.0.1", options.controller_port.value_or(0)}, control);
        remote = Endpoint{"127.0.0.1", server_->data_port()};
    }
    transport_ = std::make_unique<UdpTransport>(scheduler_, remote);
    middleware_ = std::make_unique<Middleware>(cfg.intersection, cfg.middleware, scheduler_, *transport_, log_);
    if (options.middleware_control_port)
        control_ = std::make_unique<MiddlewareControlServer>(*middleware_,
                                                             Endpoint{"127.0.0.1", *options.middleware_control_port});
}

RealTestbed::~RealTestbed() { shutdown(); }

void RealTestbed::shutdown() {
    if (shut_down_) return;
    shut_down_ = true;
    if (control_) control_->stop();
    middleware_->stop();
    transport_->close();
    scheduler_.stop();
    if (server_) server_->stop();
    if (controller_scheduler_) controller_scheduler_->stop();
}

void RealTestbed::open_logs(const std::filesystem::path& dir) {
    log_.open(dir / "events.jsonl");
    if (service_) {
        std::promise<void> done;
        controller_scheduler_->post([&] {
            service_->log_to(dir / "controller.jsonl");
            done.set_value();
        });
        done.get_future().wait();
    }
}

bool RealTestbed::start(Duration limit) {
    auto ready = std::make_shared<std::promise<bool>>();
    auto result = ready->get_future();
    scheduler_.post([this, ready] { middleware_->start([ready](bool ok) { ready->set_value(ok); }); });
    if (result.wait_for(limit) != std::future_status::ready) return false;
    return result.get();
}

std::optional<std::uint16_t> RealTestbed::controller_data_port() const {
    if (!server_) return std::nullopt;
    return server_->data_port();
}

std::optional<std::uint16_t> RealTestbed::controller_control_port() const {
    if (!server_) return std::nullopt;
    return server_->control_port();
}

std::optional<std::uint16_t> RealTestbed::middleware_control_port() const {
    if (!control_) return std::nullopt;
    return control_->port();
}

}  // namespace phasebridge::sim
