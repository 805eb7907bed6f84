/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "phasebridge/core/errors.hpp"

namespace phasebridge {

/// Largest phase number representable in a one-byte phase bitmask.
inline constexpr int kMaxPhaseId = 8;

struct PhaseId {
    int value = 0;

    constexpr PhaseId() = default;
    constexpr explicit PhaseId(int v) : value(v) {}
    constexpr auto operator<=>(const PhaseId&) const = default;
};

/// One phase per ring, served concurrently.
struct PhasePair {
    PhaseId ring1;
    PhaseId ring2;

    constexpr auto operator<=>(const PhasePair&) const = default;
};

constexpr PhasePair pair_of(int ring1, int ring2) { return {PhaseId{ring1}, PhaseId{ring2}}; }

std::string to_string(const PhasePair& pair);
std::ostream& operator<<(std::ostream& os, const PhasePair& pair);
std::ostream& operator<<(std::ostream& os, PhaseId id);

/// Seconds.
struct PhaseTiming {
    double min_green = 3.0;
    double max_green = 20.0;
    double yellow = 3.0;
    double red_clearance = 2.0;

    bool operator==(const PhaseTiming&) const = default;
};

struct PhaseSpec {
    PhaseId id;
    int ring = 1;     // 1 or 2
    int barrier = 0;  // barrier group index
    PhaseTiming timing;
};

/// Immutable ring-and-barrier description: phases, membership, compatibility
/// matrix, timing and the cycle used by cyclic actions.
class RingBarrierConfig {
public:
    /// Validates and builds. `compat` is row-major over `phases` in the given order.
    /// Throws ConfigError on any structural violation.
    static RingBarrierConfig build(std::vector<PhaseSpec> phases, std::vector<std::vector<bool>> compat,
                                   std::vector<PhasePair> sequence);

    const std::vector<PhaseSpec>& phases() const { return phases_; }
    std::vector<PhaseId> phase_ids() const;
    const std::vector<PhasePair>& sequence() const { return sequence_; }

    bool contains(PhaseId id) const { return index_.contains(id.value); }
    int ring_of(PhaseId id) const { return spec(id).ring; }
    int barrier_of(PhaseId id) const { return spec(id).barrier; }
    const PhaseTiming& timing(PhaseId id) const { return spec(id).timing; }
    bool compat(PhaseId i, PhaseId j) const { return compat_[index_of(i)][index_of(j)]; }

    /// Pair timing: both minimum greens honoured, neither maximum exceeded,
    /// clearance long enough for the slower phase.
    PhaseTiming pair_timing(const PhasePair& pair) const;

    /// Bitmask with bit (n-1) set for every configured phase n.
    std::uint8_t phase_mask() const;

private:
    RingBarrierConfig() = default;
    std::size_t index_of(PhaseId id) const;
    const PhaseSpec& spec(PhaseId id) const { return phases_[index_of(id)]; }

    std::vector<PhaseSpec> phases_;
    std::vector<std::vector<bool>> compat_;
    std::vector<PhasePair> sequence_;
    std::map<int, std::size_t> index_;
};

/// The standard 2-ring, 2-barrier, 8-phase intersection with uniform timing
/// (3 s min green, 20 s max green, 3 s yellow, 2 s red clearance) and the
/// sequence [1,5] -> [2,6] -> [3,7] -> [4,8].
RingBarrierConfig standard_intersection(PhaseTiming timing = {});

bool is_compatible(const RingBarrierConfig& cfg, PhaseId i, PhaseId j);
bool is_compatible(const RingBarrierConfig& cfg, const PhasePair& pair);

/// Successor in the configured cycle, wrapping from last to first.
PhasePair next_pair(const RingBarrierConfig& cfg, const PhasePair& current);

/// Every (ring-1 phase, ring-2 phase) combination marked compatible, ordered
/// by (ring1, ring2).
std::vector<PhasePair> enumerate_admissible_pairs(const RingBarrierConfig& cfg);

}  // namespace phasebridge
