#pragma once

#include "mpsched/fd_estimator.hpp"
#include "mpsched/rng.hpp"
#include "mpsched/time.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpsched {

// A subflow with window room asks the scheduler which send-buffer index to
// transmit. Pull contract: schedulers only ever answer queries; they never
// initiate a transmission.
struct SchedulerQuery {
    int requesting_path = 0;
    std::int64_t buffer_len = 0; // >= 1 when a query is issued
    SimTime now{0};
};

// What the index formula needs to know about each path.
struct PathTelemetry {
    SimTime srtt{0};              // 0 until first measurement
    double throughput_bps = 0.0;  // smoothed delivery rate, bytes/s
};

// Shortest-forward-delay path selection: every unordered pair (i, j) votes
// for its faster member (fair coin on an exact tie, s=0 electing i); pairs
// without an estimate abstain. Returns the per-path vote counts.
//
// DeltaFn: (int i, int j) -> std::optional<SimTime>, antisymmetric.
template <typename DeltaFn>
std::vector<int> shortest_fd_path_counts(int n_paths, DeltaFn&& delta, RngStream& rng) {
    std::vector<int> counts(static_cast<std::size_t>(n_paths), 0);
    for (int i = 0; i < n_paths; ++i) {
        for (int j = i + 1; j < n_paths; ++j) {
            const std::optional<SimTime> d = delta(i, j);
            if (!d) continue;
            if (*d < SimTime{0}) {
                ++counts[static_cast<std::size_t>(i)];
            } else if (*d > SimTime{0}) {
                ++counts[static_cast<std::size_t>(j)];
            } else {
                const int winner = rng.next_bernoulli() ? j : i;
                ++counts[static_cast<std::size_t>(winner)];
            }
        }
    }
    return counts;
}

// Argmax of the vote counts, lowest index on ties. An all-abstain matrix
// therefore yields path 0 (cold-start convention).
template <typename DeltaFn>
int find_shortest_fd_path(int n_paths, DeltaFn&& delta, RngStream& rng) {
    const std::vector<int> counts = shortest_fd_path_counts(n_paths, delta, rng);
    int best = 0;
    for (int i = 1; i < n_paths; ++i) {
        if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

// Buffer index for a path whose forward delay exceeds the fastest path's by
// `delta_to_fastest`: floor(delta * rate / MSS), i.e. the number of segments
// the fast path can move in the head start. Clamped to [0, buffer_len).
// Non-positive delta (including a stale cached fastest-path choice) and
// missing estimates fall back to index 0.
inline std::int64_t forward_delay_index(SimTime delta_to_fastest, double fastest_throughput_bps,
                                        std::int64_t mss, std::int64_t buffer_len) {
    if (buffer_len < 1) {
        throw std::invalid_argument("forward_delay_index: empty buffer");
    }
    if (delta_to_fastest <= SimTime{0} || fastest_throughput_bps <= 0.0) {
        return 0;
    }
    const double packets = to_seconds(delta_to_fastest) * fastest_throughput_bps / static_cast<double>(mss);
    auto idx = static_cast<std::int64_t>(std::floor(packets));
    if (idx < 0) idx = 0;
    if (idx > buffer_len - 1) idx = buffer_len - 1;
    return idx;
}

class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual std::int64_t pick_index(const SchedulerQuery& query) = 0;
    virtual std::string_view name() const = 0;
};

// Default MPTCP behaviour: always send the oldest buffered segment.
class FifoScheduler final : public Scheduler {
public:
    std::int64_t pick_index(const SchedulerQuery&) override { return 0; }
    std::string_view name() const override { return "fifo"; }
};

// Forward-delay-based scheduling: pick the shortest-forward-delay path from
// the estimator matrix (refreshed at most once per fastest-path RTT), then
// offset slower paths' picks by the bandwidth-delay-product difference.
class FdpsScheduler final : public Scheduler {
public:
    FdpsScheduler(int n_paths, const ForwardDelayEstimator& estimator,
                  const std::vector<PathTelemetry>& telemetry, std::int64_t mss, RngStream rng)
        : n_(n_paths), estimator_(&estimator), telemetry_(&telemetry), mss_(mss), rng_(rng) {}

    std::int64_t pick_index(const SchedulerQuery& query) override {
        refresh_fastest(query.now);
        if (query.requesting_path == fastest_) {
            if (trace_) trace_(query.now, query.requesting_path, SimTime{0}, 0.0, 0);
            return 0;
        }
        const auto delta = estimator_->delta_between(query.requesting_path, fastest_, query.now);
        if (!delta) {
            if (trace_) trace_(query.now, query.requesting_path, SimTime{0}, 0.0, 0);
            return 0;
        }
        const double x_star = (*telemetry_)[static_cast<std::size_t>(fastest_)].throughput_bps;
        const std::int64_t idx = forward_delay_index(*delta, x_star, mss_, query.buffer_len);
        if (trace_) trace_(query.now, query.requesting_path, *delta, x_star, idx);
        return idx;
    }

    std::string_view name() const override { return "fdps"; }

    int fastest_path() const { return fastest_; }

    // Diagnostic tap: (now, path, delta to fastest (ns; 0 if none), x*, index).
    using PickTrace = std::function<void(SimTime, int, SimTime, double, std::int64_t)>;
    void set_pick_trace(PickTrace t) { trace_ = std::move(t); }

private:
    void refresh_fastest(SimTime now) {
        if (have_fastest_ && now < next_refresh_) {
            return;
        }
        fastest_ = find_shortest_fd_path(
            n_, [&](int i, int j) { return estimator_->delta_between(i, j, now); }, rng_);
        have_fastest_ = true;
        next_refresh_ = now + refresh_period();
    }

    // "Every RTT": the fastest control loop the sender has, i.e. the minimum
    // measured srtt. Until any path has an RTT sample the choice is
    // recomputed on every query.
    SimTime refresh_period() const {
        SimTime period{0};
        for (const PathTelemetry& t : *telemetry_) {
            if (t.srtt > SimTime{0} && (period == SimTime{0} || t.srtt < period)) {
                period = t.srtt;
            }
        }
        return period;
    }

    int n_;
    const ForwardDelayEstimator* estimator_;
    const std::vector<PathTelemetry>* telemetry_;
    std::int64_t mss_;
    RngStream rng_;
    int fastest_ = 0;
    bool have_fastest_ = false;
    SimTime next_refresh_{0};
    PickTrace trace_;
};

// Kim-2012 analogue: same structure as FDPS but the forward-delay difference
// is approximated by half the smoothed-RTT difference, everywhere (path
// selection and index formula). Unmeasured paths count as srtt 0.
class RttHalfScheduler final : public Scheduler {
public:
    RttHalfScheduler(int n_paths, const std::vector<PathTelemetry>& telemetry, std::int64_t mss,
                     RngStream rng)
        : n_(n_paths), telemetry_(&telemetry), mss_(mss), rng_(rng) {}

    std::int64_t pick_index(const SchedulerQuery& query) override {
        refresh_fastest(query.now);
        if (query.requesting_path == fastest_) {
            if (trace_) trace_(query.now, query.requesting_path, SimTime{0}, 0.0, 0);
            return 0;
        }
        const SimTime delta = rtt_half_delta(query.requesting_path, fastest_);
        const double x_star = (*telemetry_)[static_cast<std::size_t>(fastest_)].throughput_bps;
        const std::int64_t idx = forward_delay_index(delta, x_star, mss_, query.buffer_len);
        if (trace_) trace_(query.now, query.requesting_path, delta, x_star, idx);
        return idx;
    }

    std::string_view name() const override { return "rtt-half"; }

    int fastest_path() const { return fastest_; }

    using PickTrace = FdpsScheduler::PickTrace;
    void set_pick_trace(PickTrace t) { trace_ = std::move(t); }

private:
    SimTime rtt_half_delta(int i, int j) const {
        const SimTime a = (*telemetry_)[static_cast<std::size_t>(i)].srtt;
        const SimTime b = (*telemetry_)[static_cast<std::size_t>(j)].srtt;
        return (a - b) / 2;
    }

    void refresh_fastest(SimTime now) {
        if (have_fastest_ && now < next_refresh_) {
            return;
        }
        fastest_ = find_shortest_fd_path(
            n_, [&](int i, int j) { return std::optional<SimTime>(rtt_half_delta(i, j)); }, rng_);
        have_fastest_ = true;
        SimTime period{0};
        for (const PathTelemetry& t : *telemetry_) {
            if (t.srtt > SimTime{0} && (period == SimTime{0} || t.srtt < period)) {
                period = t.srtt;
            }
        }
        next_refresh_ = now + period;
    }

    int n_;
    const std::vector<PathTelemetry>* telemetry_;
    std::int64_t mss_;
    RngStream rng_;
    int fastest_ = 0;
    bool have_fastest_ = false;
    SimTime next_refresh_{0};
    PickTrace trace_;
};

inline bool is_known_scheduler(std::string_view name) {
    return name == "fifo" || name == "fdps" || name == "rtt-half";
}

inline std::unique_ptr<Scheduler> make_scheduler(std::string_view name, int n_paths,
                                                 const ForwardDelayEstimator& estimator,
                                                 const std::vector<PathTelemetry>& telemetry,
                                                 std::int64_t mss, RngStream rng) {
    if (name == "fifo") return std::make_unique<FifoScheduler>();
    if (name == "fdps") return std::make_unique<FdpsScheduler>(n_paths, estimator, telemetry, mss, rng);
    if (name == "rtt-half") return std::make_unique<RttHalfScheduler>(n_paths, telemetry, mss, rng);
    throw std::invalid_argument("unknown scheduler: " + std::string(name));
}

} // namespace mpsched
