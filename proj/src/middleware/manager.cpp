/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/middleware/manager.hpp"

#include <algorithm>

#include "phasebridge/core/errors.hpp"

namespace phasebridge {

using nlohmann::json;

namespace {

json pair_json(const PhasePair& p) { return json::array({p.ring1.value, p.ring2.value}); }

json mask_json(wire::PhaseBitmask mask) {
    json out = json::array();
    for (auto id : wire::mask_to_phases(mask)) out.push_back(id.value);
    return out;
}

}  // namespace

void MiddlewareConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("middleware.") + name + " must be positive");
    };
    positive(poll_hz, "poll_hz");
    positive(udp_timeout, "udp_timeout");
    positive(transition_timeout, "transition_timeout");
    positive(verify_interval, "verify_interval");
    positive(lock_window, "lock_window");
    if (n_timeout < 1) throw ConfigError("middleware.n_timeout must be at least 1");
    if (n_drift < 1) throw ConfigError("middleware.n_drift must be at least 1");
    if (verify_interval > transition_timeout)
        throw ConfigError("middleware.verify_interval exceeds transition_timeout");
}

MiddlewareConfig middleware_config_from_json(const json& j) {
    MiddlewareConfig cfg;
    try {
        cfg.poll_hz = j.value("poll_hz", cfg.poll_hz);
        cfg.udp_timeout = j.value("udp_timeout", cfg.udp_timeout);
        cfg.transition_timeout = j.value("transition_timeout", cfg.transition_timeout);
        cfg.n_timeout = j.value("n_timeout", cfg.n_timeout);
        cfg.n_drift = j.value("n_drift", cfg.n_drift);
        cfg.verify_interval = j.value("verify_interval", cfg.verify_interval);
        cfg.lock_window = j.value("lock_window", cfg.lock_window);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("middleware: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json to_json(const MiddlewareConfig& cfg) {
    return {{"poll_hz", cfg.poll_hz},
            {"udp_timeout", cfg.udp_timeout},
            {"transition_timeout", cfg.transition_timeout},
            {"n_timeout", cfg.n_timeout},
            {"n_drift", cfg.n_drift},
            {"verify_interval", cfg.verify_interval},
            {"lock_window", cfg.lock_window}};
}

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Idle: return "IDLE";
        case Mode::OnHold: return "ON_HOLD";
        case Mode::Timeout: return "TIMEOUT";
    }
    return "?";
}

std::string_view to_string(TimeoutCause c) {
    switch (c) {
        case TimeoutCause::CommFailure: return "COMM_FAILURE";
        case TimeoutCause::TransitionTimeout: return "TRANSITION_TIMEOUT";
        case TimeoutCause::SimDrift: return "SIM_DRIFT";
    }
    return "?";
}

std::string_view to_string(SubmitResult r) {
    switch (r) {
        case SubmitResult::Accepted: return "accepted";
        case SubmitResult::Dropped: return "dropped";
        case SubmitResult::ConflictRejected: return "conflict_rejected";
        case SubmitResult::InTimeout: return "in_timeout";
    }
    return "?";
}

json ManagerSnapshot::to_json() const {
    json j{{"started", started},
           {"mode", to_string(mode)},
           {"current_pair", pair_json(current_pair)},
           {"target", target ? pair_json(*target) : json(nullptr)},
           {"hold_deadline", hold_deadline ? json(to_seconds(*hold_deadline)) : json(nullptr)},
           {"timeout_cause", timeout_cause ? json(to_string(*timeout_cause)) : json(nullptr)},
           {"consecutive_poll_timeouts", consecutive_poll_timeouts},
           {"consecutive_drifts", consecutive_drifts}};
    if (signal) {
        j["signal"] = {{"greens", mask_json(signal->greens())},
                       {"yellows", mask_json(signal->yellows())},
                       {"polled_at", to_seconds(signal->polled_at)},
                       {"poll_seq", signal->poll_seq}};
    } else {
        j["signal"] = nullptr;
    }
    return j;
}

Middleware::Middleware(RingBarrierConfig intersection, MiddlewareConfig cfg, Scheduler& scheduler,
                       DatagramTransport& transport, EventLog& log)
    : intersection_(std::move(intersection)),
      cfg_(cfg),
      scheduler_(scheduler),
      log_(log),
      client_(scheduler, transport, from_seconds(cfg.udp_timeout)) {
    cfg_.validate();
    current_pair_ = intersection_.sequence().front();
}

Middleware::~Middleware() { stop(); }

void Middleware::start(std::function<void(bool)> ready) {
    TimePoint began;
    {
        std::lock_guard lock(mu_);
        if (started_ || stopped_) throw PreconditionError("middleware already started");
        began = scheduler_.now();
    }
    initial_read(began, std::move(ready));
}

void Middleware::initial_read(TimePoint began, std::function<void(bool)> ready) {
    client_.read_status([this, began, ready = std::move(ready)](std::optional<StatusGroups> groups) mutable {
        bool finished = true;
        bool ok = false;
        {
            std::lock_guard lock(mu_);
            if (stopped_) return;
            auto pair = groups ? pair_from_greens(groups->green) : std::nullopt;
            if (!groups) {
                started_ = true;
                enter_timeout(TimeoutCause::CommFailure);
            } else if (pair) {
                publish(*groups);
                current_pair_ = *pair;
                mode_ = Mode::Idle;
                started_ = true;
                start_polling();
                ok = true;
            } else if (scheduler_.now() - began < from_seconds(cfg_.transition_timeout)) {
                // Controller is between pairs; look again shortly.
                finished = false;
                scheduler_.schedule_after(cfg_.poll_period(), [this, began, ready]() mutable {
                    initial_read(began, std::move(ready));
                });
            } else {
                started_ = true;
                enter_timeout(TimeoutCause::TransitionTimeout);
            }
        }
        if (finished && ready) ready(ok);
    });
}

void Middleware::stop() {
    std::lock_guard lock(mu_);
    if (stopped_) return;
    stopped_ = true;
    ++poll_generation_;
    scheduler_.cancel(poll_timer_);
    scheduler_.cancel(verify_timer_);
}

SubmitResult Middleware::submit_action(const Action& action) {
    std::lock_guard lock(mu_);
    if (!started_) throw PreconditionError("middleware not started");
    const std::uint64_t id = next_command_id_++;
    const auto kind = action.kind();
    log_.emit(EventKind::ActionOut, {{"cmd", id}, {"action", to_string(kind)}});

    UnifiedCommand cmd;
    try {
        cmd = convert_action(intersection_, action, current_pair_);
    } catch (const ConflictError& e) {
        log_.emit(EventKind::ConflictRejected, {{"cmd", id}, {"action", to_string(kind)}, {"reason", e.what()}});
        return SubmitResult::ConflictRejected;
    }

    if (mode_ != Mode::Idle) {
        log_.emit(EventKind::Dropped, {{"cmd", id}, {"action", to_string(kind)}, {"mode", to_string(mode_)}});
        return mode_ == Mode::Timeout ? SubmitResult::InTimeout : SubmitResult::Dropped;
    }

    log_.emit(EventKind::Converted, {{"cmd", id},
                                     {"action", to_string(kind)},
                                     {"pair", pair_json(cmd.pair)},
                                     {"hold", cmd.hold ? json(to_seconds(*cmd.hold)) : json(nullptr)}});

    mode_ = Mode::OnHold;
    TimePoint at = log_.emit(EventKind::Dispatched, {{"cmd", id},
                                                     {"action", to_string(kind)},
                                                     {"pair", pair_json(cmd.pair)},
                                                     {"from", "IDLE"},
                                                     {"to", "ON_HOLD"}});
    command_ = Command{id, kind, cmd, at, 0, false};

    bool sent = client_.set_call(wire::pair_to_mask(cmd.pair),
                                 [this, id](SetOutcome outcome) { on_set_outcome(id, outcome); });
    if (!sent) {
        enter_timeout(TimeoutCause::CommFailure);
        return SubmitResult::Accepted;
    }
    verify_timer_ = scheduler_.schedule_at(at + from_seconds(cfg_.verify_interval), [this, id] { verify_tick(id); });
    return SubmitResult::Accepted;
}

void Middleware::on_set_outcome(std::uint64_t command_id, SetOutcome outcome) {
    std::lock_guard lock(mu_);
    if (stopped_) return;
    switch (outcome) {
        case SetOutcome::Acked: log_.emit(EventKind::SetAcked, {{"cmd", command_id}}); break;
        case SetOutcome::Rejected: log_.emit(EventKind::SetRejected, {{"cmd", command_id}}); break;
        case SetOutcome::TimedOut: log_.emit(EventKind::SetTimeout, {{"cmd", command_id}}); break;
    }
}

void Middleware::verify_tick(std::uint64_t command_id) {
    std::lock_guard lock(mu_);
    if (stopped_ || mode_ != Mode::OnHold || !command_ || command_->id != command_id || command_->matched) return;

    const auto now = scheduler_.now();
    const auto& target = command_->cmd.pair;
    auto snap = cache_.load();
    const bool fresh = snap && snap->polled_at >= command_->dispatched_at;
    const bool match = fresh && snap->matches(target);
    log_.emit(EventKind::VerifyPoll,
              {{"cmd", command_id}, {"poll_seq", snap ? snap->poll_seq : 0}, {"match", match}});

    if (match) {
        command_->matched = true;
        log_.emit(EventKind::VerifyMatch,
                  {{"cmd", command_id}, {"pair", pair_json(target)}, {"green_seen_at", to_seconds(snap->polled_at)}});
        if (!command_->cmd.hold) {
            release_locked();
            return;
        }
        const TimePoint deadline = snap->polled_at + *command_->cmd.hold;
        hold_deadline_ = deadline;
        if (deadline <= now) {
            release_locked();
        } else {
            verify_timer_ = scheduler_.schedule_at(deadline, [this, command_id] { release(command_id); });
        }
        return;
    }

    if (now - command_->dispatched_at >= from_seconds(cfg_.transition_timeout)) {
        enter_timeout(TimeoutCause::TransitionTimeout);
        return;
    }
    ++command_->ticks;
    const auto next = command_->dispatched_at + (command_->ticks + 1) * from_seconds(cfg_.verify_interval);
    verify_timer_ = scheduler_.schedule_at(next, [this, command_id] { verify_tick(command_id); });
}

void Middleware::release(std::uint64_t command_id) {
    std::lock_guard lock(mu_);
    if (stopped_ || mode_ != Mode::OnHold || !command_ || command_->id != command_id) return;
    release_locked();
}

void Middleware::release_locked() {
    current_pair_ = command_->cmd.pair;
    const auto id = command_->id;
    const auto kind = command_->kind;
    command_.reset();
    hold_deadline_.reset();
    verify_timer_ = 0;
    mode_ = Mode::Idle;
    log_.emit(EventKind::HoldReleased, {{"cmd", id},
                                        {"action", to_string(kind)},
                                        {"pair", pair_json(current_pair_)},
                                        {"from", "ON_HOLD"},
                                        {"to", "IDLE"}});
}

void Middleware::start_polling() {
    ++poll_generation_;
    next_poll_at_ = scheduler_.now() + cfg_.poll_period();
    schedule_poll(next_poll_at_);
}

void Middleware::schedule_poll(TimePoint at) {
    const auto gen = poll_generation_;
    poll_timer_ = scheduler_.schedule_at(at, [this, gen] { poll_tick(gen); });
}

void Middleware::poll_tick(std::uint64_t generation) {
    {
        std::lock_guard lock(mu_);
        if (stopped_ || generation != poll_generation_) return;
        next_poll_at_ += cfg_.poll_period();
    }
    client_.read_status([this, generation](std::optional<StatusGroups> groups) { on_poll(groups, generation); });
}

void Middleware::on_poll(std::optional<StatusGroups> groups, std::uint64_t generation) {
    std::lock_guard lock(mu_);
    if (stopped_ || generation != poll_generation_) return;
    if (groups) {
        publish(*groups);
        poll_timeouts_ = 0;
        log_.emit(EventKind::PollOk,
                  {{"poll_seq", poll_seq_}, {"greens", mask_json(groups->green)}, {"yellows", mask_json(groups->yellow)}});
    } else {
        ++poll_timeouts_;
        log_.emit(EventKind::PollTimeout, {{"consecutive", poll_timeouts_}});
        if (poll_timeouts_ >= cfg_.n_timeout) {
            enter_timeout(TimeoutCause::CommFailure);
            return;
        }
    }
    schedule_poll(std::max(next_poll_at_, scheduler_.now()));
}

std::optional<TimeoutCause> Middleware::report_step_duration(Duration elapsed, Duration step_length) {
    std::lock_guard lock(mu_);
    if (!started_ || stopped_ || mode_ == Mode::Timeout) return std::nullopt;
    if (elapsed <= step_length) {
        drifts_ = 0;
        return std::nullopt;
    }
    ++drifts_;
    log_.emit(EventKind::Drift,
              {{"elapsed", to_seconds(elapsed)}, {"step", to_seconds(step_length)}, {"consecutive", drifts_}});
    if (drifts_ < cfg_.n_drift) return std::nullopt;
    enter_timeout(TimeoutCause::SimDrift);
    return TimeoutCause::SimDrift;
}

void Middleware::recover(std::function<void(RecoverResult)> done) {
    bool busy = false;
    {
        std::lock_guard lock(mu_);
        if (!started_ || mode_ != Mode::Timeout)
            throw PreconditionError("recover requires TIMEOUT mode, manager is " + std::string(to_string(mode_)));
        busy = recovering_;
        recovering_ = true;
    }
    if (busy) {
        RecoverResult r;
        r.message = "recovery already in progress";
        done(r);
        return;
    }
    client_.read_status([this, done = std::move(done)](std::optional<StatusGroups> groups) {
        RecoverResult r;
        {
            std::lock_guard lock(mu_);
            recovering_ = false;
            auto pair = groups ? pair_from_greens(groups->green) : std::nullopt;
            if (stopped_) {
                r.message = "middleware stopped";
            } else if (!groups) {
                r.message = "controller did not answer";
            } else if (!pair) {
                publish(*groups);
                r.message = "controller is not resting on a compatible pair";
            } else {
                publish(*groups);
                mode_ = Mode::Idle;
                cause_.reset();
                poll_timeouts_ = 0;
                drifts_ = 0;
                current_pair_ = *pair;
                log_.emit(EventKind::Recovered, {{"pair", pair_json(*pair)}, {"from", "TIMEOUT"}, {"to", "IDLE"}});
                start_polling();
                r.ok = true;
                r.pair = pair;
            }
            r.mode = mode_;
        }
        done(r);
    });
}

ManagerSnapshot Middleware::snapshot() const {
    std::lock_guard lock(mu_);
    ManagerSnapshot s;
    s.started = started_;
    s.mode = mode_;
    s.current_pair = current_pair_;
    if (command_) s.target = command_->cmd.pair;
    s.hold_deadline = hold_deadline_;
    s.timeout_cause = cause_;
    s.signal = cache_.load();
    s.consecutive_poll_timeouts = poll_timeouts_;
    s.consecutive_drifts = drifts_;
    return s;
}

void Middleware::enter_timeout(TimeoutCause cause) {
    const auto from = mode_;
    json detail{{"cause", to_string(cause)}, {"from", to_string(from)}, {"to", "TIMEOUT"}};
    if (command_) detail["cmd"] = command_->id;
    mode_ = Mode::Timeout;
    cause_ = cause;
    command_.reset();
    hold_deadline_.reset();
    scheduler_.cancel(verify_timer_);
    verify_timer_ = 0;
    ++poll_generation_;
    scheduler_.cancel(poll_timer_);
    poll_timer_ = 0;
    log_.emit(EventKind::TimeoutSet, std::move(detail));
}

void Middleware::publish(const StatusGroups& groups) {
    auto state = assemble_signal_state(groups.red, groups.yellow, groups.green, scheduler_.now());
    state.poll_seq = ++poll_seq_;
    cache_.publish(state);
}

std::optional<PhasePair> Middleware::pair_from_greens(wire::PhaseBitmask greens) const {
    auto phases = wire::mask_to_phases(greens);
    if (phases.size() != 2) return std::nullopt;
    for (auto id : phases)
        if (!intersection_.contains(id)) return std::nullopt;
    PhasePair p{phases[0], phases[1]};
    if (intersection_.ring_of(p.ring1) != 1) std::swap(p.ring1, p.ring2);
    if (intersection_.ring_of(p.ring1) != 1 || intersection_.ring_of(p.ring2) != 2) return std::nullopt;
    if (!is_compatible(intersection_, p)) return std::nullopt;
    return p;
}

}  // namespace phasebridge
