/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <utility>

#include "phasebridge/runtime/clock.hpp"

namespace phasebridge {

using TimerId = std::uint64_t;

/// Timer service. Callbacks run one at a time, in (due time, submission order).
class Scheduler {
public:
    virtual ~Scheduler() = default;

    virtual const Clock& clock() const = 0;
    virtual TimerId schedule_at(TimePoint when, std::function<void()> fn) = 0;
    virtual void cancel(TimerId id) = 0;

    TimePoint now() const { return clock().now(); }
    TimerId schedule_after(Duration delay, std::function<void()> fn) {
        return schedule_at(now() + delay, std::move(fn));
    }
    TimerId post(std::function<void()> fn) { return schedule_at(now(), std::move(fn)); }
};

// Ordered timer queue shared by both scheduler flavours. Not thread safe.
class TimerQueue {
public:
    TimerId push(TimePoint when, std::function<void()> fn);
    void erase(TimerId id);
    bool empty() const { return entries_.empty(); }
    TimePoint next_due() const { return TimePoint{Duration{entries_.begin()->first.first}}; }
    std::pair<TimePoint, std::function<void()>> pop();
    std::size_t size() const { return entries_.size(); }

private:
    using Key = std::pair<std::int64_t, TimerId>;
    std::map<Key, std::function<void()>> entries_;
    std::unordered_map<TimerId, Key> index_;
    TimerId next_id_ = 1;
};

/// Discrete-event scheduler over a VirtualClock. The caller drives time forward
/// with run_until(); the whole system then runs single-threaded and deterministic.
class VirtualScheduler final : public Scheduler {
public:
    const Clock& clock() const override { return clock_; }
    TimerId schedule_at(TimePoint when, std::function<void()> fn) override;
    void cancel(TimerId id) override { queue_.erase(id); }

    /// Runs every callback due at or before `until`, then parks the clock at `until`.
    void run_until(TimePoint until);
    void run_for(Duration d) { run_until(now() + d); }
    /// Runs until `pred` holds or `limit` is reached. Returns pred().
    bool run_until(const std::function<bool()>& pred, TimePoint limit);

    std::size_t pending() const { return queue_.size(); }

private:
    VirtualClock clock_;
    TimerQueue queue_;
};

/// Wall-clock scheduler with its own worker thread.
class RealScheduler final : public Scheduler {
public:
    RealScheduler();
    ~RealScheduler() override;
    RealScheduler(const RealScheduler&) = delete;
    RealScheduler& operator=(const RealScheduler&) = delete;

    const Clock& clock() const override { return clock_; }
    TimerId schedule_at(TimePoint when, std::function<void()> fn) override;
    void cancel(TimerId id) override;

    void stop();

private:
    void run();

    SteadyClock clock_;
    std::mutex mu_;
    std::condition_variable cv_;
    TimerQueue queue_;
    bool stopping_ = false;
    std::thread worker_;
};

}  // namespace phasebridge
