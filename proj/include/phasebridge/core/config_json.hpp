/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <filesystem>

#include <json.hpp>

#include "phasebridge/core/ring_barrier.hpp"

namespace phasebridge {

/// Parses the `intersection` section. Unlike RingBarrierConfig::build, an
/// empty sequence is rejected here. Throws ConfigError.
RingBarrierConfig ring_barrier_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RingBarrierConfig& cfg);

/// Reads a whole JSON document; parse failures become ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace phasebridge
