/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/runtime/scheduler.hpp"

namespace phasebridge {

TimerId TimerQueue::push(TimePoint when, std::function<void()> fn) {
    TimerId id = next_id_++;
    Key key{when.time_since_epoch().count(), id};
    entries_.emplace(key, std::move(fn));
    index_.emplace(id, key);
    return id;
}

void TimerQueue::erase(TimerId id) {
    auto it = index_.find(id);
    if (it == index_.end()) return;
    entries_.erase(it->second);
    index_.erase(it);
}

std::pair<TimePoint, std::function<void()>> TimerQueue::pop() {
    auto it = entries_.begin();
    TimePoint when{Duration{it->first.first}};
    auto fn = std::move(it->second);
    index_.erase(it->first.second);
    entries_.erase(it);
    return {when, std::move(fn)};
}

TimerId VirtualScheduler::schedule_at(TimePoint when, std::function<void()> fn) {
    if (when < clock_.now()) when = clock_.now();
    return queue_.push(when, std::move(fn));
}

void VirtualScheduler::run_until(TimePoint until) {
    while (!queue_.empty() && queue_.next_due() <= until) {
        auto [when, fn] = queue_.pop();
        clock_.advance_to(when);
        fn();
    }
    clock_.advance_to(until);
}

bool VirtualScheduler::run_until(const std::function<bool()>& pred, TimePoint limit) {
    while (!pred()) {
        if (queue_.empty() || queue_.next_due() > limit) {
            clock_.advance_to(limit);
            return pred();
        }
        auto [when, fn] = queue_.pop();
        clock_.advance_to(when);
        fn();
    }
    return true;
}

RealScheduler::RealScheduler() : worker_([this] { run(); }) {}

RealScheduler::~RealScheduler() { stop(); }

TimerId RealScheduler::schedule_at(TimePoint when, std::function<void()> fn) {
    TimerId id;
    {
        std::lock_guard lock(mu_);
        if (stopping_) return 0;
        id = queue_.push(when, std::move(fn));
    }
    cv_.notify_one();
    return id;
}

void RealScheduler::cancel(TimerId id) {
    std::lock_guard lock(mu_);
    queue_.erase(id);
}

void RealScheduler::stop() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

void RealScheduler::run() {
    std::unique_lock lock(mu_);
    while (!stopping_) {
        if (queue_.empty()) {
            cv_.wait(lock);
            continue;
        }
        TimePoint due = queue_.next_due();
        if (clock_.now() < due) {
            cv_.wait_until(lock, clock_.to_steady(due));
            continue;
        }
        auto entry = queue_.pop();
        lock.unlock();
        entry.second();
        lock.lock();
    }
}

}  // namespace phasebridge
