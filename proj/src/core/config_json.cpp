/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "phasebridge/core/config_json.hpp"

#include <fstream>

namespace phasebridge {

using nlohmann::json;

namespace {

PhaseTiming timing_from_json(const json& j, PhaseTiming base) {
    base.min_green = j.value("min_green", base.min_green);
    base.max_green = j.value("max_green", base.max_green);
    base.yellow = j.value("yellow", base.yellow);
    base.red_clearance = j.value("red_clearance", base.red_clearance);
    return base;
}

}  // namespace

RingBarrierConfig ring_barrier_from_json(const json& j) {
    try {
        PhaseTiming defaults = timing_from_json(j.value("default_timing", json::object()), PhaseTiming{});

        std::vector<PhaseSpec> phases;
        for (const auto& p : j.at("phases")) {
            PhaseSpec spec;
            spec.id = PhaseId{p.at("id").get<int>()};
            spec.ring = p.at("ring").get<int>();
            spec.barrier = p.value("barrier", 0);
            spec.timing = timing_from_json(p, defaults);
            phases.push_back(spec);
        }

        std::vector<std::vector<bool>> compat;
        for (const auto& row : j.at("compat")) {
            std::vector<bool> r;
            for (const auto& v : row) {
                int bit = v.get<int>();
                if (bit != 0 && bit != 1) throw ConfigError("compatibility entries must be 0 or 1");
                r.push_back(bit == 1);
            }
            compat.push_back(std::move(r));
        }

        std::vector<PhasePair> sequence;
        for (const auto& pr : j.value("sequence", json::array())) {
            if (!pr.is_array() || pr.size() != 2) throw ConfigError("sequence entries must be [ring1, ring2] pairs");
            sequence.push_back(pair_of(pr[0].get<int>(), pr[1].get<int>()));
        }
        if (sequence.empty()) throw ConfigError("phase sequence is empty");

        return RingBarrierConfig::build(std::move(phases), std::move(compat), std::move(sequence));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("intersection: ") + e.what());
    }
}

json to_json(const RingBarrierConfig& cfg) {
    json phases = json::array();
    for (const auto& p : cfg.phases()) {
        phases.push_back({{"id", p.id.value},
                          {"ring", p.ring},
                          {"barrier", p.barrier},
                          {"min_green", p.timing.min_green},
                          {"max_green", p.timing.max_green},
                          {"yellow", p.timing.yellow},
                          {"red_clearance", p.timing.red_clearance}});
    }
    json compat = json::array();
    for (const auto& a : cfg.phases()) {
        json row = json::array();
        for (const auto& b : cfg.phases()) row.push_back(cfg.compat(a.id, b.id) ? 1 : 0);
        compat.push_back(row);
    }
    json sequence = json::array();
    for (const auto& pr : cfg.sequence()) sequence.push_back({pr.ring1.value, pr.ring2.value});
    return {{"phases", phases}, {"compat", compat}, {"sequence", sequence}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace phasebridge
