#pragma once

#include "mpsched/reorder_metrics.hpp"
#include "mpsched/scenario.hpp"
#include "mpsched/simulation.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsched {

// Outcome of `runs` independent seeded simulations of one (scenario,
// scheduler) pair. Histograms are pooled over all runs' arrivals; occupancy
// mean/stddev are taken across the per-run means.
struct BatchResult {
    std::string scenario;
    std::string scheduler;
    std::vector<RunResult> runs;
    ReorderHistogram rbd;
    ReorderHistogram rd;
    OccupancyStats occupancy;
};

namespace detail {

inline ReorderHistogram pool(const std::vector<RunResult>& runs, ReorderHistogram::Kind kind) {
    std::map<std::int64_t, double> weighted;
    std::int64_t total = 0;
    for (const RunResult& r : runs) {
        const ReorderHistogram h =
            kind == ReorderHistogram::Kind::rbd ? compute_rbd(r.record) : compute_rd(r.record);
        const auto n = static_cast<std::int64_t>(r.record.size());
        total += n;
        for (const auto& [idx, density] : h.bins) {
            weighted[idx] += density * static_cast<double>(n);
        }
    }
    ReorderHistogram pooled;
    pooled.kind = kind;
    if (total > 0) {
        for (const auto& [idx, w] : weighted) {
            pooled.bins[idx] = w / static_cast<double>(total);
        }
    }
    return pooled;
}

} // namespace detail

// Runs the batch with seeds base_seed, base_seed+1, ... A non-empty
// scheduler override replaces the config's scheduler. Deterministic: the
// same inputs produce an identical BatchResult.
inline BatchResult run_batch(const ScenarioConfig& config, const std::string& scheduler_override = "",
                             SimulationOptions opts = {}) {
    ScenarioConfig cfg = config;
    if (!scheduler_override.empty()) {
        cfg.scheduler = scheduler_override;
    }
    validate_scenario(cfg);

    BatchResult out;
    out.scenario = cfg.name;
    out.scheduler = cfg.scheduler;
    out.runs.reserve(static_cast<std::size_t>(cfg.runs));
    for (int run = 0; run < cfg.runs; ++run) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(run);
        try {
            Simulation sim(cfg, seed, opts);
            out.runs.push_back(sim.run());
        } catch (const std::exception& e) {
            throw std::runtime_error("scenario '" + cfg.name + "' scheduler '" + cfg.scheduler +
                                     "' run " + std::to_string(run) + " (seed " +
                                     std::to_string(seed) + "): " + e.what());
        }
    }

    out.rbd = detail::pool(out.runs, ReorderHistogram::Kind::rbd);
    out.rd = detail::pool(out.runs, ReorderHistogram::Kind::rd);
    std::vector<ArrivalRecord> records;
    records.reserve(out.runs.size());
    for (const RunResult& r : out.runs) {
        records.push_back(r.record);
    }
    out.occupancy = occupancy_stats(records);
    return out;
}

} // namespace mpsched
