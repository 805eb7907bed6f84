/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "phasebridge/middleware/latency.hpp"
#include "../support/fixtures.hpp"

using namespace phasebridge;
using nlohmann::json;

namespace {

struct LogBuilder {
    std::vector<EventRecord> records;
    std::uint64_t next = 1;

    // ACTION_OUT at `t`, DISPATCHED `lat_ms` later.
    std::uint64_t command(ActionKind kind, double t, double lat_ms) {
        const auto id = next++;
        const auto out = TimePoint{Duration{std::llround(t * 1e9)}};
        records.push_back({out, EventKind::ActionOut, {{"cmd", id}, {"action", to_string(kind)}}});
        records.push_back({out + Duration{std::llround(lat_ms * 1e6)},
                           EventKind::Dispatched,
                           {{"cmd", id}, {"action", to_string(kind)}, {"pair", {2, 6}}}});
        return id;
    }
};

// Independent statistics oracle.
std::pair<double, double> mean_and_sample_std(const std::vector<double>& xs) {
    long double m = 0;
    for (double x : xs) m += x;
    m /= xs.size();
    long double ss = 0;
    for (double x : xs) ss += (x - m) * (x - m);
    return {static_cast<double>(m), static_cast<double>(std::sqrt(ss / (xs.size() - 1)))};
}

// n non-negative samples with the given mean and sample std: k outliers at
// `b + d`, the rest at `b`.
std::vector<double> two_level_samples(int n, double mean, double sd) {
    for (int k = 1; k < n; ++k) {
        const double p = static_cast<double>(k) / n;
        const double d = std::sqrt(sd * sd * (n - 1) / (n * p * (1 - p)));
        const double b = mean - p * d;
        if (b > 0.05) {
            std::vector<double> xs(static_cast<std::size_t>(n), b);
            for (int i = 0; i < k; ++i) xs[static_cast<std::size_t>(i * (n / k))] = b + d;
            return xs;
        }
    }
    return {};
}

}  // namespace

TEST(Latency, TwoOneMillisecondSamples) {
    LogBuilder lb;
    lb.command(ActionKind::Switch, 1.0, 1.0);
    lb.command(ActionKind::Switch, 2.0, 1.0);
    auto t = internal_latency(lb.records);
    const auto& s = t.by_kind.at(ActionKind::Switch);
    EXPECT_EQ(s.count, 2u);
    EXPECT_NEAR(s.mean_ms, 1.0, 1e-9);
    EXPECT_NEAR(s.std_ms, 0.0, 1e-9);
    EXPECT_EQ(t.unmatched, 0u);
}

TEST(Latency, EmptyLog) {
    auto t = internal_latency({});
    EXPECT_TRUE(t.by_kind.empty());
    EXPECT_EQ(t.unmatched, 0u);
    EXPECT_EQ(t.format(), "action          N    mean (ms)     std (ms)\n");
}

TEST(Latency, SingleSampleHasZeroStd) {
    LogBuilder lb;
    lb.command(ActionKind::Duration, 0.0, 0.7);
    auto s = internal_latency(lb.records).by_kind.at(ActionKind::Duration);
    EXPECT_NEAR(s.mean_ms, 0.7, 1e-6);
    EXPECT_EQ(s.std_ms, 0.0);
}

TEST(Latency, MatchesStatisticsOracle) {
    phasebridge::testing::Rng rng(51);
    LogBuilder lb;
    std::map<ActionKind, std::vector<double>> truth;
    for (int i = 0; i < 300; ++i) {
        auto kind = static_cast<ActionKind>(phasebridge::testing::uniform_int(rng, 0, 2));
        double ms = std::round(phasebridge::testing::uniform_real(rng, 0.01, 3.0) * 1e6) / 1e6;
        lb.command(kind, i * 0.5, ms);
        truth[kind].push_back(ms);
    }
    auto t = internal_latency(lb.records);
    for (const auto& [kind, xs] : truth) {
        auto [m, sd] = mean_and_sample_std(xs);
        const auto& s = t.by_kind.at(kind);
        EXPECT_EQ(s.count, xs.size());
        EXPECT_NEAR(s.mean_ms, m, 1e-6);
        EXPECT_NEAR(s.std_ms, sd, 1e-6);
        EXPECT_NEAR(s.min_ms, *std::min_element(xs.begin(), xs.end()), 1e-6);
        EXPECT_NEAR(s.max_ms, *std::max_element(xs.begin(), xs.end()), 1e-6);
        EXPECT_EQ(t.samples_ms.at(kind).size(), xs.size());
    }
}

TEST(Latency, UnmatchedEventsExcludedAndCounted) {
    LogBuilder lb;
    lb.command(ActionKind::Selection, 0.0, 0.5);
    // Dropped action: ACTION_OUT without DISPATCHED.
    lb.records.push_back({at_seconds(1), EventKind::ActionOut, {{"cmd", 99}, {"action", "switch"}}});
    lb.records.push_back({at_seconds(1), EventKind::Dropped, {{"cmd", 99}, {"action", "switch"}}});
    // DISPATCHED with no ACTION_OUT.
    lb.records.push_back({at_seconds(2), EventKind::Dispatched, {{"cmd", 100}, {"action", "switch"}}});
    // Unknown action name.
    lb.records.push_back({at_seconds(3), EventKind::ActionOut, {{"cmd", 101}, {"action", "teleport"}}});
    auto t = internal_latency(lb.records);
    EXPECT_EQ(t.by_kind.size(), 1u);
    EXPECT_EQ(t.by_kind.at(ActionKind::Selection).count, 1u);
    EXPECT_EQ(t.unmatched, 3u);
    EXPECT_NE(t.format().find("unmatched events: 3"), std::string::npos);
}

// The table renders in the same columns as the published measurements.
TEST(Latency, TableFormatAgainstPublishedRows) {
    struct Row {
        ActionKind kind;
        int n;
        double mean, sd;
    };
    const Row rows[] = {{ActionKind::Selection, 71, 0.6464, 0.6278},
                        {ActionKind::Switch, 91, 0.8745, 1.0798},
                        {ActionKind::Duration, 54, 0.6906, 0.6729}};
    LogBuilder lb;
    double t = 0;
    for (const auto& r : rows) {
        auto xs = two_level_samples(r.n, r.mean, r.sd);
        ASSERT_EQ(static_cast<int>(xs.size()), r.n);
        for (double ms : xs) lb.command(r.kind, t += 1.0, ms);
    }
    auto table = internal_latency(lb.records);
    EXPECT_EQ(table.format(),
              "action          N    mean (ms)     std (ms)\n"
              "selection      71       0.6464       0.6278\n"
              "switch         91       0.8745       1.0798\n"
              "duration       54       0.6906       0.6729\n");
    auto j = table.to_json();
    EXPECT_EQ(j["internal_latency"]["switch"]["n"], 91);
    EXPECT_NEAR(j["internal_latency"]["switch"]["mean_ms"].get<double>(), 0.8745, 1e-4);
}

TEST(Latency, ReadLogSkipsCorruptLines) {
    auto path = std::filesystem::temp_directory_path() / "pb_latency_corrupt.jsonl";
    {
        std::ofstream f(path);
        f << R"({"t":1.0,"event":"ACTION_OUT","cmd":1,"action":"switch"})" << "\n";
        f << "not json at all\n";
        f << R"({"t":1.001,"event":"DISPATCHED","cmd":1,"action":"switch"})" << "\n";
        f << R"({"t":"x","event":"DISPATCHED"})" << "\n";
        f << R"({"t":2.0,"event":"NO_SUCH_EVENT"})" << "\n";
        f << "\n";
        f << R"({"t":2.0,"event":"ACTION_OUT","cmd":2,"acti)";  // torn final line
    }
    auto log = read_event_log(path);
    EXPECT_EQ(log.records.size(), 2u);
    EXPECT_EQ(log.skipped_lines, 4u);
    auto t = internal_latency(log.records);
    EXPECT_NEAR(t.by_kind.at(ActionKind::Switch).mean_ms, 1.0, 1e-6);
    std::filesystem::remove(path);
    EXPECT_THROW(read_event_log(path), ConfigError);
}

TEST(Latency, EventRecordJsonRoundTrip) {
    EventRecord r{at_seconds(12.5), EventKind::TimeoutSet, {{"cause", "COMM_FAILURE"}, {"from", "IDLE"}}};
    auto j = r.to_json();
    EXPECT_EQ(j["event"], "TIMEOUT_SET");
    EXPECT_EQ(j["cause"], "COMM_FAILURE");
    auto back = EventRecord::from_json(j);
    ASSERT_TRUE(back);
    EXPECT_EQ(back->kind, r.kind);
    EXPECT_EQ(back->t, r.t);
    EXPECT_EQ(back->detail, r.detail);
}

TEST(CommandTraces, NominalOrderAndHold) {
    std::vector<EventRecord> rs;
    auto add = [&](double t, EventKind k, json d) { rs.push_back({at_seconds(t), k, std::move(d)}); };
    json c1{{"cmd", 1}};
    add(0.0, EventKind::ActionOut, {{"cmd", 1}, {"action", "switch"}});
    add(0.0, EventKind::Converted, {{"cmd", 1}, {"pair", {2, 6}}});
    add(0.0, EventKind::Dispatched, c1);
    add(0.0001, EventKind::SetAcked, c1);
    add(0.1, EventKind::VerifyPoll, c1);
    add(5.1, EventKind::VerifyPoll, c1);
    add(5.1, EventKind::VerifyMatch, c1);
    add(5.1, EventKind::HoldReleased, c1);
    // Second command times out.
    json c2{{"cmd", 2}};
    add(10.0, EventKind::ActionOut, {{"cmd", 2}, {"action", "duration"}});
    add(10.0, EventKind::Converted, c2);
    add(10.0, EventKind::Dispatched, c2);
    add(10.1, EventKind::VerifyPoll, c2);
    add(20.0, EventKind::TimeoutSet, {{"cmd", 2}, {"cause", "TRANSITION_TIMEOUT"}});
    // Third never dispatched.
    add(30.0, EventKind::ActionOut, {{"cmd", 3}, {"action", "switch"}});
    add(30.0, EventKind::Dropped, {{"cmd", 3}});

    auto traces = command_traces(rs);
    ASSERT_EQ(traces.size(), 2u);
    EXPECT_TRUE(traces[0].nominal_order());
    EXPECT_EQ(traces[0].kind, ActionKind::Switch);
    EXPECT_EQ(traces[0].pair, pair_of(2, 6));
    EXPECT_EQ(traces[0].verify_polls, 2);
    ASSERT_TRUE(traces[0].hold());
    EXPECT_NEAR(to_seconds(*traces[0].hold()), 5.1, 1e-9);
    EXPECT_FALSE(traces[1].nominal_order());
    EXPECT_FALSE(traces[1].hold());
    EXPECT_TRUE(traces[1].timed_out);

    auto j = to_json(traces[0]);
    EXPECT_EQ(j["events"][0]["event"], "ACTION_OUT");
    EXPECT_NEAR(j["events"].back()["dt"].get<double>(), 5.1, 1e-9);
    EXPECT_NEAR(j["hold_s"].get<double>(), 5.1, 1e-9);
}

TEST(CommandTraces, OutOfOrderIsNotNominal) {
    std::vector<EventRecord> rs;
    json c{{"cmd", 1}};
    rs.push_back({at_seconds(0), EventKind::ActionOut, {{"cmd", 1}, {"action", "switch"}}});
    rs.push_back({at_seconds(0), EventKind::Dispatched, c});
    rs.push_back({at_seconds(0), EventKind::Converted, c});
    rs.push_back({at_seconds(1), EventKind::VerifyPoll, c});
    rs.push_back({at_seconds(1), EventKind::VerifyMatch, c});
    rs.push_back({at_seconds(1), EventKind::HoldReleased, c});
    EXPECT_FALSE(command_traces(rs)[0].nominal_order());
    // No verify poll at all.
    rs.erase(rs.begin() + 3);
    std::swap(rs[1], rs[2]);
    EXPECT_FALSE(command_traces(rs)[0].nominal_order());
}
