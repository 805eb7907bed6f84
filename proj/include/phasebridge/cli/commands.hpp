/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace phasebridge::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTimeout = 2;
inline constexpr int kExitConfig = 3;

/// Reads PHASEBRIDGE_LOG (trace, debug, info, warn, error, off) and sets up stderr logging.
void init_logging();

struct ControllerArgs {
    std::optional<std::filesystem::path> config;
    std::uint16_t port = 5601;
    std::optional<std::uint16_t> control_port = 5602;
    std::string fault = "normal";
    std::optional<std::filesystem::path> log;
};

/// Serves until `stop` becomes true.
int cmd_controller(const ControllerArgs& args, const std::atomic<bool>& stop);

struct RunArgs {
    std::optional<std::filesystem::path> config;
    std::string agent = "switch";
    std::optional<double> duration;
    std::string clock = "virtual";
    std::optional<std::string> fault;
    bool embedded = false;
    std::filesystem::path out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> host;
    std::optional<std::uint16_t> port;
    /// Middleware control port (recover / snapshot); wall-clock runs only.
    std::optional<std::uint16_t> control_port;
};

/// Writes events.jsonl, controller.jsonl (embedded controller), harness.jsonl
/// and metrics.json into `out`.
int cmd_run(const RunArgs& args, std::ostream& out);

struct ReportArgs {
    std::filesystem::path events;
    std::optional<std::filesystem::path> trajectory;  // default: next to events
};

int cmd_report(const ReportArgs& args, std::ostream& out);

struct RecoverArgs {
    std::string endpoint = "127.0.0.1:5603";
    double timeout = 10.0;
};

/// 0 recovered, 1 precondition failure or no answer, 2 still in TIMEOUT.
int cmd_recover(const RecoverArgs& args, std::ostream& out);

}  // namespace phasebridge::cli
