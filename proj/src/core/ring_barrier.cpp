/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/core/ring_barrier.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace phasebridge {

std::string to_string(const PhasePair& pair) {
    std::ostringstream os;
    os << pair;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const PhasePair& pair) {
    return os << '[' << pair.ring1.value << ',' << pair.ring2.value << ']';
}

std::ostream& operator<<(std::ostream& os, PhaseId id) { return os << id.value; }

namespace {

void check_timing(const PhaseSpec& p) {
    const auto& t = p.timing;
    auto where = "phase " + std::to_string(p.id.value) + ": ";
    if (!(t.min_green > 0.0)) throw ConfigError(where + "min_green must be positive");
    if (!(t.min_green <= t.max_green)) throw ConfigError(where + "min_green exceeds max_green");
    if (!(t.yellow > 0.0)) throw ConfigError(where + "yellow must be positive");
    if (!(t.red_clearance >= 0.0)) throw ConfigError(where + "red_clearance must be non-negative");
}

}  // namespace

RingBarrierConfig RingBarrierConfig::build(std::vector<PhaseSpec> phases, std::vector<std::vector<bool>> compat,
                                           std::vector<PhasePair> sequence) {
    RingBarrierConfig cfg;
    if (phases.empty()) throw ConfigError("configuration has no phases");

    std::set<int> rings;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        const auto& p = phases[k];
        if (p.id.value < 1 || p.id.value > kMaxPhaseId)
            throw ConfigError("phase id " + std::to_string(p.id.value) + " outside 1.." + std::to_string(kMaxPhaseId));
        if (!cfg.index_.emplace(p.id.value, k).second)
            throw ConfigError("duplicate phase id " + std::to_string(p.id.value));
        if (p.ring != 1 && p.ring != 2)
            throw ConfigError("phase " + std::to_string(p.id.value) + " has ring " + std::to_string(p.ring) +
                              "; only rings 1 and 2 are supported");
        check_timing(p);
        rings.insert(p.ring);
    }
    if (rings.size() != 2) throw ConfigError("configuration needs phases in both ring 1 and ring 2");

    const auto n = phases.size();
    if (compat.size() != n) throw ConfigError("compatibility matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (const auto& row : compat)
        if (row.size() != n)
            throw ConfigError("compatibility matrix must be " + std::to_string(n) + "x" + std::to_string(n));

    for (std::size_t i = 0; i < n; ++i) {
        if (compat[i][i]) throw ConfigError("phase " + std::to_string(phases[i].id.value) + " marked compatible with itself");
        for (std::size_t j = 0; j < n; ++j) {
            if (compat[i][j] != compat[j][i]) throw ConfigError("compatibility matrix is not symmetric");
            if (!compat[i][j]) continue;
            auto pi = phases[i].id.value, pj = phases[j].id.value;
            if (phases[i].ring == phases[j].ring)
                throw ConfigError("phases " + std::to_string(pi) + " and " + std::to_string(pj) +
                                  " share a ring but are marked compatible");
            if (phases[i].barrier != phases[j].barrier)
                throw ConfigError("phases " + std::to_string(pi) + " and " + std::to_string(pj) +
                                  " sit across a barrier but are marked compatible");
        }
    }

    cfg.phases_ = std::move(phases);
    cfg.compat_ = std::move(compat);

    for (const auto& pair : sequence) {
        if (!cfg.contains(pair.ring1) || !cfg.contains(pair.ring2))
            throw ConfigError("sequence pair " + to_string(pair) + " references an unknown phase");
        if (cfg.ring_of(pair.ring1) != 1 || cfg.ring_of(pair.ring2) != 2)
            throw ConfigError("sequence pair " + to_string(pair) + " must be ordered (ring 1, ring 2)");
        if (!cfg.compat(pair.ring1, pair.ring2))
            throw ConfigError("sequence pair " + to_string(pair) + " is not compatible");
    }
    cfg.sequence_ = std::move(sequence);
    return cfg;
}

std::vector<PhaseId> RingBarrierConfig::phase_ids() const {
    std::vector<PhaseId> ids;
    ids.reserve(phases_.size());
    for (const auto& p : phases_) ids.push_back(p.id);
    return ids;
}

std::size_t RingBarrierConfig::index_of(PhaseId id) const {
    auto it = index_.find(id.value);
    if (it == index_.end()) throw ConfigError("unknown phase id " + std::to_string(id.value));
    return it->second;
}

PhaseTiming RingBarrierConfig::pair_timing(const PhasePair& pair) const {
    const auto& a = timing(pair.ring1);
    const auto& b = timing(pair.ring2);
    PhaseTiming t;
    t.min_green = std::max(a.min_green, b.min_green);
    t.max_green = std::max(t.min_green, std::min(a.max_green, b.max_green));
    t.yellow = std::max(a.yellow, b.yellow);
    t.red_clearance = std::max(a.red_clearance, b.red_clearance);
    return t;
}

std::uint8_t RingBarrierConfig::phase_mask() const {
    std::uint8_t mask = 0;
    for (const auto& p : phases_) mask |= static_cast<std::uint8_t>(1u << (p.id.value - 1));
    return mask;
}

RingBarrierConfig standard_intersection(PhaseTiming timing) {
    std::vector<PhaseSpec> phases;
    for (int id = 1; id <= 8; ++id) {
        int ring = id <= 4 ? 1 : 2;
        int barrier = (id == 1 || id == 2 || id == 5 || id == 6) ? 0 : 1;
        phases.push_back({PhaseId{id}, ring, barrier, timing});
    }
    // 1 = compatible; rows/columns are phases 1..8.
    static constexpr int kMatrix[8][8] = {
        {0, 0, 0, 0, 1, 1, 0, 0}, {0, 0, 0, 0, 1, 1, 0, 0}, {0, 0, 0, 0, 0, 0, 1, 1}, {0, 0, 0, 0, 0, 0, 1, 1},
        {1, 1, 0, 0, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 1, 1, 0, 0, 0, 0}, {0, 0, 1, 1, 0, 0, 0, 0},
    };
    std::vector<std::vector<bool>> compat(8, std::vector<bool>(8));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) compat[i][j] = kMatrix[i][j] == 1;
    return RingBarrierConfig::build(std::move(phases), std::move(compat),
                                    {pair_of(1, 5), pair_of(2, 6), pair_of(3, 7), pair_of(4, 8)});
}

bool is_compatible(const RingBarrierConfig& cfg, PhaseId i, PhaseId j) { return cfg.compat(i, j); }

bool is_compatible(const RingBarrierConfig& cfg, const PhasePair& pair) {
    return cfg.contains(pair.ring1) && cfg.contains(pair.ring2) && cfg.ring_of(pair.ring1) == 1 &&
           cfg.ring_of(pair.ring2) == 2 && cfg.compat(pair.ring1, pair.ring2);
}

PhasePair next_pair(const RingBarrierConfig& cfg, const PhasePair& current) {
    const auto& seq = cfg.sequence();
    auto it = std::find(seq.begin(), seq.end(), current);
    if (it == seq.end()) throw SequenceError("pair " + to_string(current) + " is not in the configured sequence");
    ++it;
    return it == seq.end() ? seq.front() : *it;
}

std::vector<PhasePair> enumerate_admissible_pairs(const RingBarrierConfig& cfg) {
    std::vector<PhasePair> out;
    for (const auto& a : cfg.phases()) {
        if (a.ring != 1) continue;
        for (const auto& b : cfg.phases()) {
            if (b.ring != 2) continue;
            if (cfg.compat(a.id, b.id)) out.push_back({a.id, b.id});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace phasebridge
