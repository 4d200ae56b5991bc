#pragma once

#include "mpsched/batch.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsched {

// Shortest round-trip decimal form, always with a decimal point or exponent
// so a density of one reads "1.0". Stable formatting keeps repeated runs
// byte-identical.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << contents;
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

} // namespace detail

inline std::string histogram_csv(const ReorderHistogram& h) {
    std::string s = "index,density\n";
    for (const auto& [idx, density] : h.bins) {
        s += std::to_string(idx);
        s += ',';
        s += format_double(density);
        s += '\n';
    }
    return s;
}

// Per-run rows followed by one aggregate row (run = "all") carrying the
// cross-run mean and sample standard deviation.
inline std::string summary_csv(const std::vector<BatchResult>& batches) {
    std::string s = "scenario,scheduler,run,mean_occupancy,std_occupancy\n";
    for (const BatchResult& b : batches) {
        for (std::size_t r = 0; r < b.occupancy.per_run_mean.size(); ++r) {
            s += b.scenario + ',' + b.scheduler + ',' + std::to_string(r) + ',' +
                 format_double(b.occupancy.per_run_mean[r]) + ",\n";
        }
        s += b.scenario + ',' + b.scheduler + ",all," + format_double(b.occupancy.mean) + ',' +
             format_double(b.occupancy.stddev) + '\n';
    }
    return s;
}

// Plain-text table: scenarios down, schedulers across, "mean +- std" cells.
inline std::string occupancy_table(const std::vector<BatchResult>& batches) {
    std::vector<std::string> scenarios;
    std::vector<std::string> schedulers;
    for (const BatchResult& b : batches) {
        if (std::find(scenarios.begin(), scenarios.end(), b.scenario) == scenarios.end()) {
            scenarios.push_back(b.scenario);
        }
        if (std::find(schedulers.begin(), schedulers.end(), b.scheduler) == schedulers.end()) {
            schedulers.push_back(b.scheduler);
        }
    }

    auto cell = [&](const std::string& sc, const std::string& sch) -> std::string {
        for (const BatchResult& b : batches) {
            if (b.scenario == sc && b.scheduler == sch) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.2f +- %.2f", b.occupancy.mean,
                              b.occupancy.stddev);
                return buf;
            }
        }
        return "-";
    };

    std::string s = "Mean of buffer occupancy (in MSS)\n";
    s += "scenario";
    for (const auto& sch : schedulers) {
        s += '\t' + sch;
    }
    s += '\n';
    for (const auto& sc : scenarios) {
        s += sc;
        for (const auto& sch : schedulers) {
            s += '\t' + cell(sc, sch);
        }
        s += '\n';
    }
    return s;
}

// Writes rbd_/rd_ histograms for every batch plus summary.csv and table.txt.
// Returns the files written.
inline std::vector<std::filesystem::path> emit_outputs(const std::vector<BatchResult>& batches,
                                                       const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> files;
    for (const BatchResult& b : batches) {
        const auto rbd_path = out_dir / ("rbd_" + b.scenario + "_" + b.scheduler + ".csv");
        detail::write_file(rbd_path, histogram_csv(b.rbd));
        files.push_back(rbd_path);
        const auto rd_path = out_dir / ("rd_" + b.scenario + "_" + b.scheduler + ".csv");
        detail::write_file(rd_path, histogram_csv(b.rd));
        files.push_back(rd_path);
    }
    const auto summary_path = out_dir / "summary.csv";
    detail::write_file(summary_path, summary_csv(batches));
    files.push_back(summary_path);
    const auto table_path = out_dir / "table.txt";
    detail::write_file(table_path, occupancy_table(batches));
    files.push_back(table_path);
    return files;
}

inline std::vector<std::filesystem::path> emit_outputs(const BatchResult& batch,
                                                       const std::filesystem::path& out_dir) {
    return emit_outputs(std::vector<BatchResult>{batch}, out_dir);
}

} // namespace mpsched
