/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace phasebridge {

class Clock;

// All timestamps are monotonic nanoseconds since the owning clock's epoch.
using Duration = std::chrono::nanoseconds;
using TimePoint = std::chrono::time_point<Clock, Duration>;

inline constexpr Duration from_seconds(double s) {
    return std::chrono::round<Duration>(std::chrono::duration<double>(s));
}

inline constexpr double to_seconds(Duration d) {
    return std::chrono::duration<double>(d).count();
}

inline constexpr double to_seconds(TimePoint t) { return to_seconds(t.time_since_epoch()); }

inline constexpr TimePoint at_seconds(double s) { return TimePoint{from_seconds(s)}; }

/// Monotonic time source shared by controller, middleware and harness.
class Clock {
public:
    using rep = Duration::rep;
    using period = Duration::period;
    using duration = Duration;
    using time_point = TimePoint;
    static constexpr bool is_steady = true;

    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
};

/// Wraps std::chrono::steady_clock; the epoch is the construction instant.
class SteadyClock final : public Clock {
public:
    SteadyClock() : origin_(std::chrono::steady_clock::now()) {}

    TimePoint now() const override {
        return TimePoint{std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - origin_)};
    }

    std::chrono::steady_clock::time_point to_steady(TimePoint t) const {
        return origin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(t.time_since_epoch());
    }

private:
    std::chrono::steady_clock::time_point origin_;
};

/// Manually advanced clock. Time never moves backwards.
class VirtualClock final : public Clock {
public:
    TimePoint now() const override { return TimePoint{Duration{now_ns_.load(std::memory_order_acquire)}}; }

    void advance_to(TimePoint t) {
        auto ns = t.time_since_epoch().count();
        if (ns > now_ns_.load(std::memory_order_relaxed)) now_ns_.store(ns, std::memory_order_release);
    }

    void advance_by(Duration d) { advance_to(now() + d); }

private:
    std::atomic<std::int64_t> now_ns_{0};
};

}  // namespace phasebridge
