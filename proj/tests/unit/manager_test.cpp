/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include "phasebridge/core/errors.hpp"
#include "phasebridge/middleware/manager.hpp"
#include "phasebridge/sim/testbed.hpp"
#include "../support/fixtures.hpp"

using namespace phasebridge;
using namespace std::chrono_literals;
using controller::FaultMode;
using phasebridge::testing::of_kind;

namespace {

struct Bed {
    explicit Bed(sim::RunConfig cfg = phasebridge::testing::standard_config()) : tb(cfg) {}

    sim::VirtualTestbed tb;

    Middleware& mw() { return tb.middleware(); }
    VirtualScheduler& sched() { return tb.scheduler(); }
    std::vector<EventRecord> records() const { return const_cast<sim::VirtualTestbed&>(tb).log().records(); }
    std::size_t count(EventKind k) { return tb.log().count(k); }
    void run_for(Duration d) { sched().run_for(d); }
    bool run_until(std::function<bool()> pred, Duration limit) {
        return sched().run_until(pred, sched().now() + limit);
    }
    Mode mode() { return mw().snapshot().mode; }
    void fault(FaultMode m) { tb.service().set_fault_mode(m); }
    std::size_t controller_calls() {
        std::size_t n = 0;
        for (const auto& e : tb.controller().events()) n += e.kind == "VEH_CALL";
        return n;
    }
};

std::vector<EventRecord> for_cmd(const std::vector<EventRecord>& rs, std::uint64_t cmd) {
    std::vector<EventRecord> out;
    for (const auto& r : rs)
        if (r.detail.contains("cmd") && r.detail["cmd"].get<std::uint64_t>() == cmd) out.push_back(r);
    return out;
}

std::vector<EventKind> kinds_without_polls(const std::vector<EventRecord>& rs) {
    std::vector<EventKind> out;
    for (const auto& r : rs)
        if (r.kind != EventKind::VerifyPoll) out.push_back(r.kind);
    return out;
}

EventRecord last(const std::vector<EventRecord>& rs, EventKind k) {
    for (auto it = rs.rbegin(); it != rs.rend(); ++it)
        if (it->kind == k) return *it;
    throw std::runtime_error("no such event");
}

}  // namespace

TEST(Middleware, StartsIdleAndPolls) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    auto s = b.mw().snapshot();
    EXPECT_TRUE(s.started);
    EXPECT_EQ(s.mode, Mode::Idle);
    EXPECT_EQ(s.current_pair, pair_of(1, 5));
    ASSERT_TRUE(s.signal);
    b.run_for(1s);
    // 10 Hz: one cycle every 100 ms after the initial read.
    auto polls = of_kind(b.records(), EventKind::PollOk);
    EXPECT_GE(polls.size(), 9u);
    EXPECT_LE(polls.size(), 11u);
    for (std::size_t i = 1; i < polls.size(); ++i) EXPECT_NEAR(to_seconds(polls[i].t - polls[i - 1].t), 0.1, 1e-9);
}

// Healthy controller: the cached state is never older than two poll periods.
TEST(Middleware, CacheAgeStaysWithinTwoPollPeriods) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    phasebridge::testing::Rng rng(42);
    Duration worst{0};
    for (int i = 0; i < 2000; ++i) {
        b.run_for(from_seconds(phasebridge::testing::uniform_real(rng, 0.0, 0.37)));
        if (i % 50 == 0) b.mw().submit_action(Action::switch_to(1));
        auto s = b.mw().cache().load();
        ASSERT_TRUE(s);
        worst = std::max(worst, b.sched().now() - s->polled_at);
    }
    EXPECT_LE(worst, 200ms);
}

TEST(Middleware, SubmitBeforeStartIsPrecondition) {
    Bed b;
    EXPECT_THROW(b.mw().submit_action(Action::switch_to(1)), PreconditionError);
}

TEST(Middleware, SelectionLifecycle) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.run_for(250ms);
    EXPECT_EQ(b.mw().submit_action(Action::select(pair_of(2, 6))), SubmitResult::Accepted);
    EXPECT_EQ(b.mode(), Mode::OnHold);
    EXPECT_EQ(b.mw().snapshot().target, pair_of(2, 6));
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Idle; }, 20s));

    auto ev = for_cmd(b.records(), 1);
    EXPECT_EQ(kinds_without_polls(ev),
              (std::vector<EventKind>{EventKind::ActionOut, EventKind::Converted, EventKind::Dispatched,
                                      EventKind::SetAcked, EventKind::VerifyMatch, EventKind::HoldReleased}));
    EXPECT_EQ(ev[0].detail["action"], "selection");
    EXPECT_EQ(ev[2].detail["from"], "IDLE");
    EXPECT_EQ(ev[2].detail["to"], "ON_HOLD");
    const auto dispatched = ev[2].t;
    // Green arrives 5 s after the call (3 s yellow + 2 s all-red); the next
    // poll then the next verify tick see it.
    const double hold = to_seconds(last(ev, EventKind::HoldReleased).t - dispatched);
    EXPECT_GE(hold, 5.0);
    EXPECT_LE(hold, 5.0 + 0.1 + 0.1 + 0.01);
    EXPECT_EQ(b.mw().snapshot().current_pair, pair_of(2, 6));
    EXPECT_EQ(last(ev, EventKind::HoldReleased).detail["to"], "IDLE");
}

TEST(Middleware, VerifyTicksOnExactGrid) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.run_for(33ms);
    b.mw().submit_action(Action::switch_to(1));
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Idle; }, 20s));
    auto ev = for_cmd(b.records(), 1);
    const auto dispatched = ev[2].t;
    std::int64_t k = 1;
    for (const auto& r : ev)
        if (r.kind == EventKind::VerifyPoll) {
            EXPECT_EQ(r.t - dispatched, k++ * 100ms);
        }
    EXPECT_GE(k, 50);
}

TEST(Middleware, VerificationNeedsAFreshPoll) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.run_for(250ms);
    // Already green: the cached state matches, but it predates the dispatch.
    EXPECT_EQ(b.mw().submit_action(Action::select(pair_of(1, 5))), SubmitResult::Accepted);
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Idle; }, 5s));
    auto ev = for_cmd(b.records(), 1);
    const auto match = last(ev, EventKind::VerifyMatch);
    EXPECT_GE(match.detail["green_seen_at"].get<double>(), to_seconds(ev[2].t));
}

TEST(Middleware, DropsWhileOnHold) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.mw().submit_action(Action::switch_to(1));
    b.run_for(1s);
    const auto calls = b.controller_calls();
    EXPECT_EQ(b.mw().submit_action(Action::switch_to(1)), SubmitResult::Dropped);
    b.run_for(1s);
    EXPECT_EQ(b.controller_calls(), calls);
    auto ev = for_cmd(b.records(), 2);
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_EQ(ev[0].kind, EventKind::ActionOut);
    EXPECT_EQ(ev[1].kind, EventKind::Dropped);
    EXPECT_EQ(ev[1].detail["mode"], "ON_HOLD");
    EXPECT_EQ(b.count(EventKind::Dispatched), 1u);
}

TEST(Middleware, ConflictRejectedNeverReachesController) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    const auto calls = b.controller_calls();
    EXPECT_EQ(b.mw().submit_action(Action::select(pair_of(1, 2))), SubmitResult::ConflictRejected);
    EXPECT_EQ(b.mw().submit_action(Action::select(pair_of(2, 7))), SubmitResult::ConflictRejected);
    b.run_for(2s);
    EXPECT_EQ(b.controller_calls(), calls);
    EXPECT_EQ(b.count(EventKind::ConflictRejected), 2u);
    EXPECT_EQ(b.count(EventKind::Dispatched), 0u);
    EXPECT_EQ(b.mode(), Mode::Idle);
}

TEST(Middleware, MalformedActionThrows) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    EXPECT_THROW(b.mw().submit_action(Action::switch_to(3)), ValidationError);
    EXPECT_THROW(b.mw().submit_action(Action::duration(-0.5)), ValidationError);
    EXPECT_EQ(b.mode(), Mode::Idle);
}

TEST(Middleware, DurationHoldFromGreenSeen) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.run_for(170ms);
    b.mw().submit_action(Action::duration(0.5));  // [2,6] for 11.5 s
    EXPECT_EQ(b.mw().snapshot().target, pair_of(2, 6));
    ASSERT_TRUE(b.run_until([&] { return b.mw().snapshot().hold_deadline.has_value(); }, 20s));
    EXPECT_EQ(b.mode(), Mode::OnHold);
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Idle; }, 30s));
    auto ev = for_cmd(b.records(), 1);
    const auto match = last(ev, EventKind::VerifyMatch);
    const auto released = last(ev, EventKind::HoldReleased);
    EXPECT_NEAR(to_seconds(released.t) - match.detail["green_seen_at"].get<double>(), 11.5, 1e-9);
    EXPECT_EQ(last(ev, EventKind::Converted).detail["hold"], 11.5);
}

TEST(Middleware, TransitionTimeoutWhenCallsRejected) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.fault(FaultMode::RejectCalls);
    b.run_for(100ms);
    b.mw().submit_action(Action::switch_to(1));
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Timeout; }, 20s));
    auto ev = for_cmd(b.records(), 1);
    EXPECT_EQ(b.count(EventKind::SetRejected), 1u);
    const auto t = last(ev, EventKind::TimeoutSet);
    EXPECT_EQ(t.detail["cause"], "TRANSITION_TIMEOUT");
    EXPECT_EQ(t.detail["from"], "ON_HOLD");
    EXPECT_EQ(t.detail["to"], "TIMEOUT");
    EXPECT_EQ(t.t - ev[2].t, 10s);
    EXPECT_EQ(b.mw().snapshot().timeout_cause, TimeoutCause::TransitionTimeout);
    // Polling halts while in TIMEOUT.
    const auto polls = b.count(EventKind::PollOk);
    b.run_for(5s);
    EXPECT_EQ(b.count(EventKind::PollOk), polls);
    EXPECT_EQ(b.mw().submit_action(Action::switch_to(1)), SubmitResult::InTimeout);
    EXPECT_EQ(last(b.records(), EventKind::Dropped).detail["mode"], "TIMEOUT");
}

TEST(Middleware, CommFailureAfterConsecutivePollTimeouts) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.fault(FaultMode::Silent);
    const auto silent_at = b.sched().now();
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Timeout; }, 60s));
    auto timeouts = of_kind(b.records(), EventKind::PollTimeout);
    ASSERT_EQ(timeouts.size(), 5u);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(timeouts[i].detail["consecutive"], i + 1);
    const auto t = last(b.records(), EventKind::TimeoutSet);
    EXPECT_EQ(t.detail["cause"], "COMM_FAILURE");
    EXPECT_EQ(t.detail["from"], "IDLE");
    // Five 3 s read cycles back to back.
    EXPECT_NEAR(to_seconds(t.t - silent_at), 15.0, 0.2);
}

TEST(Middleware, TransitionTimeoutBeatsCommFailureWhenSilentOnHold) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.fault(FaultMode::Silent);
    b.mw().submit_action(Action::switch_to(1));
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Timeout; }, 60s));
    EXPECT_EQ(last(b.records(), EventKind::TimeoutSet).detail["cause"], "TRANSITION_TIMEOUT");
    EXPECT_EQ(b.count(EventKind::SetTimeout), 1u);
}

TEST(Middleware, SuccessfulPollResetsTimeoutCount) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.fault(FaultMode::Silent);
    ASSERT_TRUE(b.run_until([&] { return b.count(EventKind::PollTimeout) == 4; }, 60s));
    b.fault(FaultMode::Normal);
    const auto ok_before = b.count(EventKind::PollOk);
    ASSERT_TRUE(b.run_until([&] { return b.count(EventKind::PollOk) > ok_before; }, 10s));
    EXPECT_EQ(b.mw().snapshot().consecutive_poll_timeouts, 0);
    b.fault(FaultMode::Silent);
    ASSERT_TRUE(b.run_until([&] { return b.count(EventKind::PollTimeout) == 8; }, 60s));
    EXPECT_EQ(b.mode(), Mode::Idle);
    EXPECT_EQ(last(b.records(), EventKind::PollTimeout).detail["consecutive"], 4);
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Timeout; }, 60s));
    EXPECT_EQ(b.count(EventKind::PollTimeout), 9u);
}

TEST(Middleware, SendFailureIsCommFailure) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.tb.transport().fail_sends(true);
    EXPECT_EQ(b.mw().submit_action(Action::switch_to(1)), SubmitResult::Accepted);
    EXPECT_EQ(b.mode(), Mode::Timeout);
    const auto t = last(b.records(), EventKind::TimeoutSet);
    EXPECT_EQ(t.detail["cause"], "COMM_FAILURE");
    EXPECT_EQ(t.detail["cmd"], 1);
}

// Worked drift examples at a 0.25 s step with n_drift = 5.
TEST(Middleware, DriftDetection) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    const auto step = from_seconds(0.25);
    for (int i = 0; i < 20; ++i) EXPECT_FALSE(b.mw().report_step_duration(step, step));  // equal is on time
    for (int i = 0; i < 20; ++i)
        EXPECT_FALSE(b.mw().report_step_duration(from_seconds(i % 2 ? 0.20 : 0.30), step));  // never 5 in a row
    EXPECT_EQ(b.mode(), Mode::Idle);
    for (int i = 0; i < 4; ++i) EXPECT_FALSE(b.mw().report_step_duration(from_seconds(0.30), step));
    EXPECT_EQ(b.mw().snapshot().consecutive_drifts, 4);
    EXPECT_EQ(b.mw().report_step_duration(from_seconds(0.30), step), TimeoutCause::SimDrift);
    EXPECT_EQ(b.mode(), Mode::Timeout);
    EXPECT_EQ(last(b.records(), EventKind::TimeoutSet).detail["cause"], "SIM_DRIFT");
    EXPECT_EQ(b.count(EventKind::Drift), 10u + 5u);
    EXPECT_FALSE(b.mw().report_step_duration(from_seconds(1.0), step));  // ignored in TIMEOUT
    EXPECT_EQ(b.count(EventKind::Drift), 15u);
}

TEST(Middleware, RecoverPreconditionAndBusyGuard) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    EXPECT_THROW(b.mw().recover([](RecoverResult) {}), PreconditionError);
    b.tb.transport().fail_sends(true);
    b.mw().submit_action(Action::switch_to(1));
    b.tb.transport().fail_sends(false);
    ASSERT_EQ(b.mode(), Mode::Timeout);

    std::optional<RecoverResult> first, second;
    b.mw().recover([&](RecoverResult r) { first = r; });
    b.mw().recover([&](RecoverResult r) { second = r; });
    ASSERT_TRUE(second);
    EXPECT_FALSE(second->ok);
    EXPECT_EQ(second->message, "recovery already in progress");
    b.run_for(1s);
    ASSERT_TRUE(first);
    EXPECT_TRUE(first->ok);
    EXPECT_EQ(first->mode, Mode::Idle);
    EXPECT_EQ(first->pair, pair_of(1, 5));
}

TEST(Middleware, RecoverFlow) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.fault(FaultMode::Silent);
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Timeout; }, 60s));

    std::optional<RecoverResult> r;
    b.mw().recover([&](RecoverResult x) { r = x; });
    b.run_for(5s);
    ASSERT_TRUE(r);
    EXPECT_FALSE(r->ok);
    EXPECT_EQ(r->mode, Mode::Timeout);
    EXPECT_EQ(r->message, "controller did not answer");

    b.fault(FaultMode::Normal);
    // Controller mid-transition: greens do not form a pair yet.
    b.tb.controller().request_service(wire::pair_to_mask(pair_of(2, 6)), b.sched().now());
    b.tb.service().set_fault_mode(FaultMode::Normal);
    r.reset();
    b.mw().recover([&](RecoverResult x) { r = x; });
    b.run_for(100ms);
    ASSERT_TRUE(r);
    EXPECT_FALSE(r->ok);
    EXPECT_EQ(r->message, "controller is not resting on a compatible pair");

    b.run_for(10s);
    r.reset();
    b.mw().recover([&](RecoverResult x) { r = x; });
    b.run_for(100ms);
    ASSERT_TRUE(r);
    EXPECT_TRUE(r->ok);
    EXPECT_EQ(r->pair, pair_of(2, 6));
    EXPECT_EQ(b.mode(), Mode::Idle);
    EXPECT_EQ(b.mw().snapshot().current_pair, pair_of(2, 6));
    const auto rec = last(b.records(), EventKind::Recovered);
    EXPECT_EQ(rec.detail["from"], "TIMEOUT");
    EXPECT_EQ(rec.detail["to"], "IDLE");
    // Polling resumes and commands flow again.
    const auto polls = b.count(EventKind::PollOk);
    b.run_for(1s);
    EXPECT_GT(b.count(EventKind::PollOk), polls);
    EXPECT_EQ(b.mw().submit_action(Action::switch_to(1)), SubmitResult::Accepted);
    ASSERT_TRUE(b.run_until([&] { return b.mode() == Mode::Idle; }, 20s));
    EXPECT_EQ(b.mw().snapshot().current_pair, pair_of(3, 7));
}

TEST(Middleware, StartupFailsAgainstSilentController) {
    auto cfg = phasebridge::testing::standard_config();
    cfg.controller.fault = FaultMode::Silent;
    Bed b(cfg);
    EXPECT_FALSE(b.tb.start());
    EXPECT_EQ(b.mode(), Mode::Timeout);
    EXPECT_EQ(b.mw().snapshot().timeout_cause, TimeoutCause::CommFailure);
    EXPECT_EQ(b.sched().now(), at_seconds(3.0));
}

TEST(Middleware, StartupWaitsForAPair) {
    Bed b;
    b.tb.controller().request_service(wire::pair_to_mask(pair_of(2, 6)), b.sched().now());
    b.tb.service().set_fault_mode(FaultMode::Normal);
    ASSERT_TRUE(b.tb.start());
    EXPECT_EQ(b.mw().snapshot().current_pair, pair_of(2, 6));
    EXPECT_GE(b.sched().now(), at_seconds(5.0));
}

TEST(Middleware, StopIsQuiet) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    b.mw().submit_action(Action::switch_to(1));
    b.run_for(1s);
    b.mw().stop();
    b.mw().stop();
    const auto n = b.records().size();
    b.run_for(30s);
    EXPECT_EQ(b.records().size(), n);
}

TEST(Middleware, SnapshotJson) {
    Bed b;
    ASSERT_TRUE(b.tb.start());
    auto j = b.mw().snapshot().to_json();
    EXPECT_EQ(j["mode"], "IDLE");
    EXPECT_EQ(j["current_pair"], nlohmann::json::array({1, 5}));
    EXPECT_TRUE(j["target"].is_null());
    EXPECT_EQ(j["signal"]["greens"], nlohmann::json::array({1, 5}));
}

// Property: under random action streams every dispatched command ends in
// exactly one release or timeout before the next dispatch, and the controller
// never shows conflicting greens.
TEST(MiddlewareProperty, CommandLifecycleInvariants) {
    phasebridge::testing::Rng rng(41);
    const auto pairs = enumerate_admissible_pairs(standard_intersection());
    for (int trial = 0; trial < 10; ++trial) {
        Bed b;
        ASSERT_TRUE(b.tb.start());
        int submitted = 0;
        for (int k = 0; k < 60; ++k) {
            b.run_for(from_seconds(phasebridge::testing::uniform_real(rng, 0.0, 4.0)));
            Action a = Action::switch_to(1);
            switch (phasebridge::testing::uniform_int(rng, 0, 3)) {
                case 0: a = Action::select(pairs[static_cast<std::size_t>(phasebridge::testing::uniform_int(rng, 0, 7))]); break;
                case 1: a = Action::select(pair_of(phasebridge::testing::uniform_int(rng, 1, 4), phasebridge::testing::uniform_int(rng, 5, 8))); break;
                case 2: a = Action::duration(phasebridge::testing::uniform_real(rng, 0.0, 0.2)); break;
                default: a = Action::switch_to(phasebridge::testing::uniform_int(rng, 0, 1)); break;
            }
            ++submitted;
            try {
                b.mw().submit_action(a);
            } catch (const SequenceError&) {
                // Cyclic action while resting on a pair outside the cycle.
            }
            if (b.mode() == Mode::Timeout) break;
        }
        b.run_for(30s);
        auto rs = b.records();
        EXPECT_EQ(of_kind(rs, EventKind::ActionOut).size(), static_cast<std::size_t>(submitted));
        std::optional<std::uint64_t> open;
        for (const auto& r : rs) {
            if (r.kind == EventKind::Dispatched) {
                EXPECT_FALSE(open) << "dispatch while a command is open";
                open = r.detail["cmd"].get<std::uint64_t>();
            } else if (r.kind == EventKind::HoldReleased || (r.kind == EventKind::TimeoutSet && r.detail.contains("cmd"))) {
                ASSERT_TRUE(open);
                EXPECT_EQ(r.detail["cmd"].get<std::uint64_t>(), *open);
                open.reset();
            }
        }
        EXPECT_FALSE(open);
        for (const auto& e : b.tb.controller().events()) {
            auto g = wire::mask_to_phases(e.greens);
            EXPECT_TRUE(g.empty() || (g.size() == 2 && is_compatible(standard_intersection(), g[0], g[1])));
        }
    }
}
