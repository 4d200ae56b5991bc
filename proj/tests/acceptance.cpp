// Acceptance suite: end-to-end checks of the scheduling, estimation and
// metric pipeline. Run with no arguments for all criteria or with
// `--criterion N` for one. Prints one PASS/FAIL line per criterion and exits
// non-zero if any checked criterion fails.

#include "mpsched/mpsched.hpp"
#include "mpsched/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mpsched;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criterion 1: clock-offset invariance ------------------------------------

bool criterion_clock_offset() {
    Check c;
    const std::vector<SimTime> offsets = {from_sec(-10), SimTime{0}, from_sec_f(3.7)};
    for (const char* preset : {"a1", "a2", "a3", "a4", "a5"}) {
        auto cfg = preset_scenario(preset);
        cfg.runs = 2; // invariance is per-run exact; two runs exercise the batch path
        cfg.scheduler = "fdps";
        SimulationOptions opts;
        opts.log_delta_updates = true;

        std::vector<std::vector<DeltaUpdate>> logs;
        std::vector<std::string> rbd_csv;
        for (const SimTime off : offsets) {
            cfg.clock_offset = off;
            const auto batch = run_batch(cfg, "", opts);
            std::vector<DeltaUpdate> combined;
            for (const auto& run : batch.runs) {
                combined.insert(combined.end(), run.delta_log.begin(), run.delta_log.end());
            }
            logs.push_back(std::move(combined));
            rbd_csv.push_back(histogram_csv(batch.rbd));
        }
        c.expect(!logs[0].empty(), std::string(preset) + ": no estimates were produced");
        for (std::size_t k = 1; k < offsets.size(); ++k) {
            c.expect(logs[k].size() == logs[0].size(),
                     std::string(preset) + ": estimate count differs under offset");
            if (logs[k].size() == logs[0].size()) {
                for (std::size_t i = 0; i < logs[0].size(); ++i) {
                    if (logs[k][i].i != logs[0][i].i || logs[k][i].j != logs[0][i].j ||
                        logs[k][i].delta != logs[0][i].delta) {
                        c.expect(false, std::string(preset) + ": estimate sequence differs");
                        break;
                    }
                }
            }
            c.expect(rbd_csv[k] == rbd_csv[0], std::string(preset) + ": RBD csv differs");
        }
        if (!c.ok) break;
    }
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 2: shortest-path selection oracle ------------------------------

bool criterion_selection_oracle() {
    Check c;
    RngStream rng(918273645, 0);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        std::vector<std::int64_t> pool;
        for (std::int64_t v = 1; v <= 200; ++v) pool.push_back(v);
        std::vector<std::int64_t> delay(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto pick = static_cast<std::size_t>(rng.next_u64() % pool.size());
            delay[static_cast<std::size_t>(i)] = pool[pick];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        auto provider = [&](int i, int j) {
            return std::optional<SimTime>(
                from_ms(delay[static_cast<std::size_t>(i)] - delay[static_cast<std::size_t>(j)]));
        };
        const auto truth =
            static_cast<int>(std::min_element(delay.begin(), delay.end()) - delay.begin());
        RngStream tie(static_cast<std::uint64_t>(trial), 1);
        const int got = find_shortest_fd_path(n, provider, tie);
        c.expect(got == truth, "selection mismatch at trial " + std::to_string(trial));
    }

    // All-tied two-path case: fair Bernoulli over 10^4 seeds.
    int path0 = 0;
    const int seeds = 10000;
    auto zero = [](int, int) { return std::optional<SimTime>(SimTime{0}); };
    for (int s = 0; s < seeds; ++s) {
        RngStream tie(static_cast<std::uint64_t>(s), 2);
        if (find_shortest_fd_path(2, zero, tie) == 0) ++path0;
    }
    const double freq = static_cast<double>(path0) / seeds;
    c.expect(freq >= 0.48 && freq <= 0.52,
             "tie-break path-0 frequency " + std::to_string(freq) + " outside [0.48, 0.52]");

    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 3: metric oracle over all permutations of 7 -------------------

bool criterion_metric_oracle() {
    Check c;
    std::vector<std::int64_t> arrivals{1, 2, 3, 4, 5, 6, 7};
    int cases = 0;
    do {
        // Production route.
        Receiver rx;
        ArrivalRecord rec;
        for (const std::int64_t s : arrivals) {
            DataPacket p;
            p.data_seq = s - 1;
            rec.push_back(ArrivalEntry{s, rx.on_data(p, SimTime{0}).occupancy_after});
        }
        const auto rbd = compute_rbd(rec);
        const auto rd = compute_rd(rec);

        // Brute-force hypothetical buffer.
        std::set<std::int64_t> buffer;
        std::int64_t next = 1;
        std::map<std::int64_t, double> rbd_expect;
        for (const std::int64_t s : arrivals) {
            if (s == next) {
                ++next;
                while (buffer.count(next) != 0) {
                    buffer.erase(next);
                    ++next;
                }
            } else {
                buffer.insert(s);
            }
            rbd_expect[static_cast<std::int64_t>(buffer.size())] += 1.0 / 7.0;
        }
        // Direct positional arithmetic.
        std::map<std::int64_t, double> rd_expect;
        for (std::size_t pos = 0; pos < arrivals.size(); ++pos) {
            rd_expect[static_cast<std::int64_t>(pos + 1) - arrivals[pos]] += 1.0 / 7.0;
        }

        auto histogram_matches = [](const ReorderHistogram& h,
                                    const std::map<std::int64_t, double>& expect) {
            if (h.bins.size() != expect.size()) return false;
            for (const auto& [idx, dens] : expect) {
                if (std::abs(h.at(idx) - dens) > 1e-12) return false;
            }
            return true;
        };
        c.expect(histogram_matches(rbd, rbd_expect), "rbd mismatch");
        c.expect(histogram_matches(rd, rd_expect), "rd mismatch");
        c.expect(std::abs(rbd.total() - 1.0) <= 1e-9, "rbd normalization");
        c.expect(std::abs(rd.total() - 1.0) <= 1e-9, "rd normalization");
        if (!c.ok) break;
        ++cases;
    } while (std::next_permutation(arrivals.begin(), arrivals.end()));
    c.expect(cases == 5040 || !c.ok, "expected 5040 permutations");

    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

// --- scenario-level ordinal criteria ------------------------------------------

std::map<std::string, BatchResult> run_schedulers(const char* preset,
                                                  const std::vector<std::string>& schedulers) {
    std::map<std::string, BatchResult> out;
    const auto cfg = preset_scenario(preset);
    for (const auto& s : schedulers) {
        out.emplace(s, run_batch(cfg, s));
    }
    return out;
}

bool criterion_a1() {
    Check c;
    const auto r = run_schedulers("a1", {"fdps", "fifo"});
    const double fdps = r.at("fdps").occupancy.mean;
    const double fifo = r.at("fifo").occupancy.mean;
    c.expect(fdps <= fifo, "fdps mean " + std::to_string(fdps) + " > fifo mean " +
                               std::to_string(fifo));
    const double low_mass = r.at("fdps").rbd.mass(0, 2);
    c.expect(low_mass >= 0.8,
             "fdps RBD mass at {0,1,2} = " + std::to_string(low_mass) + " < 0.8");
    std::printf("  a1 mean occupancy: fdps=%.3f fifo=%.3f; fdps RBD[0..2]=%.3f\n", fdps, fifo,
                low_mass);
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

bool criterion_a2() {
    Check c;
    const auto r = run_schedulers("a2", {"fdps", "rtt-half", "fifo"});
    const double fdps = r.at("fdps").occupancy.mean;
    const double rtt_half = r.at("rtt-half").occupancy.mean;
    const double fifo = r.at("fifo").occupancy.mean;
    std::printf("  a2 mean occupancy: fdps=%.3f rtt-half=%.3f fifo=%.3f\n", fdps, rtt_half, fifo);
    c.expect(fdps <= 5.0, "fdps mean above 5 MSS");
    c.expect(fifo >= 10.0 * fdps, "fifo mean below 10x fdps");
    c.expect(fdps < rtt_half && rtt_half < fifo, "ordering fdps < rtt-half < fifo violated");
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

bool criterion_a3() {
    Check c;
    const auto r = run_schedulers("a3", {"fdps", "rtt-half", "fifo"});
    const double fdps = r.at("fdps").occupancy.mean;
    const double rtt_half = r.at("rtt-half").occupancy.mean;
    const double fifo = r.at("fifo").occupancy.mean;
    const double fdps_rd0 = r.at("fdps").rd.at(0);
    const double fifo_rd0 = r.at("fifo").rd.at(0);
    std::printf("  a3 mean occupancy: fdps=%.3f rtt-half=%.3f fifo=%.3f; RD[0] fdps=%.3f "
                "fifo=%.3f\n",
                fdps, rtt_half, fifo, fdps_rd0, fifo_rd0);
    c.expect(fdps < rtt_half && rtt_half < fifo, "ordering fdps < rtt-half < fifo violated");
    c.expect(fdps_rd0 > fifo_rd0, "fdps RD[0] not above fifo RD[0]");
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

bool criterion_a5() {
    Check c;
    const auto r = run_schedulers("a5", {"fdps", "rtt-half"});
    const double fdps = r.at("fdps").occupancy.mean;
    const double rtt_half = r.at("rtt-half").occupancy.mean;
    std::printf("  a5 mean occupancy: fdps=%.3f rtt-half=%.3f\n", fdps, rtt_half);
    c.expect(fdps < rtt_half, "fdps not below rtt-half under asymmetric backward paths");
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

bool criterion_three_path() {
    Check c;
    const auto r = run_schedulers("three-path", {"fdps", "rtt-half", "fifo"});
    const double fdps = r.at("fdps").occupancy.mean;
    const double rtt_half = r.at("rtt-half").occupancy.mean;
    const double fifo = r.at("fifo").occupancy.mean;
    std::printf("  three-path mean occupancy: fdps=%.3f rtt-half=%.3f fifo=%.3f\n", fdps,
                rtt_half, fifo);
    c.expect(fdps <= rtt_half && fdps <= fifo, "fdps is not the minimum");
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 9: byte-identical compare runs ---------------------------------

bool criterion_determinism() {
    Check c;
    const auto base = std::filesystem::temp_directory_path() / "mpsched_acceptance_det";
    std::filesystem::remove_all(base);
    const auto dir1 = base / "run1";
    const auto dir2 = base / "run2";
    for (const auto& dir : {dir1, dir2}) {
        std::vector<const char*> args = {"mpsched", "compare", "--scenario", "a2",
                                         "--seed", "42", "--out", nullptr};
        const std::string out = dir.string();
        args.back() = out.c_str();
        const int code = cli_main(static_cast<int>(args.size()), args.data());
        c.expect(code == 0, "compare exited with " + std::to_string(code));
        if (!c.ok) break;
    }
    if (c.ok) {
        std::size_t files = 0;
        for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
            const auto other = dir2 / entry.path().filename();
            c.expect(std::filesystem::exists(other),
                     "missing in second run: " + entry.path().filename().string());
            if (!c.ok) break;
            c.expect(slurp(entry.path()) == slurp(other),
                     "bytes differ: " + entry.path().filename().string());
            if (!c.ok) break;
            ++files;
        }
        c.expect(files >= 8, "expected at least 8 output files");
    }
    std::filesystem::remove_all(base);
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

// --- criterion 10: transport sanity across the scenario suite -----------------

bool criterion_transport_sanity() {
    Check c;
    for (const char* preset : {"a1", "a2", "a3", "a4", "a5", "three-path"}) {
        for (const char* sched : {"fifo", "rtt-half", "fdps"}) {
            auto cfg = preset_scenario(preset);
            cfg.scheduler = sched;
            cfg.runs = 1;
            try {
                // Conservation, queue bounds and delivery contiguity are
                // enforced inside the run; re-check the reported ledgers and
                // record uniqueness here.
                const auto batch = run_batch(cfg);
                const auto& run = batch.runs.front();
                c.expect(run.data.reconciles(), "data ledger");
                c.expect(run.acks.reconciles(), "ack ledger");
                std::set<std::int64_t> seen;
                for (const auto& e : run.record) {
                    if (!seen.insert(e.data_seq).second) {
                        c.expect(false, "duplicate in arrival record");
                        break;
                    }
                }
                for (std::int64_t s = 0; s < run.delivered; ++s) {
                    if (seen.count(s) == 0) {
                        c.expect(false, "delivered prefix has a gap");
                        break;
                    }
                }
            } catch (const std::exception& e) {
                c.expect(false, std::string(preset) + "/" + sched + ": " + e.what());
            }
            if (!c.ok) break;
        }
        if (!c.ok) break;
    }
    if (!c.ok) std::fprintf(stderr, "  detail: %s\n", c.detail.c_str());
    return c.ok;
}

struct Criterion {
    int id;
    const char* text;
    std::function<bool()> run;
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
            ++i;
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "clock-offset invariance of estimates and RBD outputs", criterion_clock_offset},
        {2, "shortest-path selection matches the brute-force delay argmin", criterion_selection_oracle},
        {3, "RBD/RD match independent oracles over all 5040 permutations", criterion_metric_oracle},
        {4, "a1: fdps occupancy <= fifo and RBD mass near zero", criterion_a1},
        {5, "a2: fdps <= 5 MSS, fifo >= 10x fdps, fdps < rtt-half < fifo", criterion_a2},
        {6, "a3: ordering holds and fdps RD concentrates at zero", criterion_a3},
        {7, "a5: fdps beats rtt-half under asymmetric backward paths", criterion_a5},
        {8, "three-path: fdps achieves the minimum occupancy", criterion_three_path},
        {9, "compare a2 --seed 42 twice produces byte-identical outputs", criterion_determinism},
        {10, "transport sanity: conservation, in-order delivery, queue bounds", criterion_transport_sanity},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        bool ok = false;
        try {
            ok = criterion.run();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "  exception: %s\n", e.what());
            ok = false;
        }
        std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.text);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
