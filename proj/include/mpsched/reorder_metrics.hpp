#pragma once

#include "mpsched/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace mpsched {

// Sparse normalized histogram. RBD bins are re-sort buffer occupancies
// (index >= 0); RD bins are signed arrival displacements.
struct ReorderHistogram {
    enum class Kind { rbd, rd };

    Kind kind = Kind::rbd;
    std::map<std::int64_t, double> bins;

    double total() const {
        double s = 0.0;
        for (const auto& [idx, d] : bins) s += d;
        return s;
    }

    double at(std::int64_t idx) const {
        auto it = bins.find(idx);
        return it == bins.end() ? 0.0 : it->second;
    }

    // Probability mass over bin indices in [lo, hi].
    double mass(std::int64_t lo, std::int64_t hi) const {
        double s = 0.0;
        for (auto it = bins.lower_bound(lo); it != bins.end() && it->first <= hi; ++it) {
            s += it->second;
        }
        return s;
    }
};

// Reorder Buffer-occupancy Density: normalized histogram of the hypothetical
// re-sort buffer occupancy, sampled per unique arrival. Bin 0 is the
// fraction of packets deliverable to the application immediately.
inline ReorderHistogram compute_rbd(const ArrivalRecord& record) {
    ReorderHistogram h;
    h.kind = ReorderHistogram::Kind::rbd;
    if (record.empty()) return h;
    std::map<std::int64_t, std::int64_t> counts;
    for (const ArrivalEntry& e : record) {
        ++counts[e.occupancy_after];
    }
    const double n = static_cast<double>(record.size());
    for (const auto& [occ, c] : counts) {
        h.bins[occ] = static_cast<double>(c) / n;
    }
    return h;
}

// Reorder Density: normalized distribution of displacements between each
// unique packet's arrival position and its in-sequence position (both ranked
// 1-based over the packets actually present in the record).
inline ReorderHistogram compute_rd(const ArrivalRecord& record) {
    ReorderHistogram h;
    h.kind = ReorderHistogram::Kind::rd;
    if (record.empty()) return h;

    std::vector<std::int64_t> seqs;
    seqs.reserve(record.size());
    for (const ArrivalEntry& e : record) {
        seqs.push_back(e.data_seq);
    }
    std::vector<std::int64_t> sorted = seqs;
    std::sort(sorted.begin(), sorted.end());

    std::map<std::int64_t, std::int64_t> counts;
    for (std::size_t pos = 0; pos < seqs.size(); ++pos) {
        const auto rank = static_cast<std::int64_t>(
            std::lower_bound(sorted.begin(), sorted.end(), seqs[pos]) - sorted.begin());
        const std::int64_t displacement = static_cast<std::int64_t>(pos) - rank;
        ++counts[displacement];
    }
    const double n = static_cast<double>(record.size());
    for (const auto& [d, c] : counts) {
        h.bins[d] = static_cast<double>(c) / n;
    }
    return h;
}

inline double mean_occupancy(const ArrivalRecord& record) {
    if (record.empty()) return 0.0;
    double sum = 0.0;
    for (const ArrivalEntry& e : record) {
        sum += static_cast<double>(e.occupancy_after);
    }
    return sum / static_cast<double>(record.size());
}

struct OccupancyStats {
    double mean = 0.0;
    double stddev = 0.0; // sample std across runs; 0 for a single run
    std::vector<double> per_run_mean;
};

// Per-run mean occupancies aggregated across independent runs, matching the
// "mean (and standard deviation) over N runs" presentation.
inline OccupancyStats occupancy_stats(const std::vector<ArrivalRecord>& runs) {
    OccupancyStats st;
    st.per_run_mean.reserve(runs.size());
    for (const ArrivalRecord& r : runs) {
        st.per_run_mean.push_back(mean_occupancy(r));
    }
    if (st.per_run_mean.empty()) return st;
    double sum = 0.0;
    for (double m : st.per_run_mean) sum += m;
    st.mean = sum / static_cast<double>(st.per_run_mean.size());
    if (st.per_run_mean.size() > 1) {
        double ss = 0.0;
        for (double m : st.per_run_mean) {
            ss += (m - st.mean) * (m - st.mean);
        }
        st.stddev = std::sqrt(ss / static_cast<double>(st.per_run_mean.size() - 1));
    }
    return st;
}

} // namespace mpsched
