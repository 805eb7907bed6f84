/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "phasebridge/core/ring_barrier.hpp"
#include "phasebridge/middleware/event_log.hpp"
#include "phasebridge/sim/run_config.hpp"

namespace phasebridge::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Eight phases where every phase has its own timing, so tests can tell
/// which phase a clearance length came from.
inline RingBarrierConfig uneven_intersection() {
    std::vector<PhaseSpec> phases;
    for (int id = 1; id <= 8; ++id) {
        const int ring = id <= 4 ? 1 : 2;
        const int barrier = (id == 1 || id == 2 || id == 5 || id == 6) ? 0 : 1;
        PhaseTiming t{2.0 + 0.5 * id, 15.0 + id, 3.0 + 0.25 * (id % 3), 1.0 + 0.5 * (id % 2)};
        phases.push_back({PhaseId{id}, ring, barrier, t});
    }
    std::vector<std::vector<bool>> compat(8, std::vector<bool>(8, false));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            compat[i][j] = phases[i].ring != phases[j].ring && phases[i].barrier == phases[j].barrier;
    return RingBarrierConfig::build(phases, compat, {pair_of(1, 5), pair_of(2, 6), pair_of(3, 7), pair_of(4, 8)});
}

/// Standard layout with every timing multiplied by `scale`, for wall-clock tests.
inline RingBarrierConfig scaled_intersection(double scale) {
    std::vector<PhaseSpec> phases;
    for (int id = 1; id <= 8; ++id) {
        const int barrier = (id == 1 || id == 2 || id == 5 || id == 6) ? 0 : 1;
        PhaseTiming t{3.0 * scale, 20.0 * scale, 3.0 * scale, 2.0 * scale};
        phases.push_back({PhaseId{id}, id <= 4 ? 1 : 2, barrier, t});
    }
    std::vector<std::vector<bool>> compat(8, std::vector<bool>(8, false));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            compat[i][j] = phases[i].ring != phases[j].ring && phases[i].barrier == phases[j].barrier;
    return RingBarrierConfig::build(phases, compat, {pair_of(1, 5), pair_of(2, 6), pair_of(3, 7), pair_of(4, 8)});
}

/// Standard intersection with the default middleware and scenario settings.
inline sim::RunConfig standard_config() {
    sim::RunConfig cfg{standard_intersection(), {}, {}, {}};
    cfg.scenario.arrival_rate.fill(0.05);
    return cfg;
}

inline std::vector<EventRecord> of_kind(const std::vector<EventRecord>& records, EventKind kind) {
    std::vector<EventRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [kind](const EventRecord& r) { return r.kind == kind; });
    return out;
}

}  // namespace phasebridge::testing
