#pragma once

#include "mpsched/event_queue.hpp"
#include "mpsched/fd_estimator.hpp"
#include "mpsched/packet.hpp"
#include "mpsched/scheduler.hpp"
#include "mpsched/send_buffer.hpp"
#include "mpsched/subflow.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsched {

struct SenderConfig {
    int n_paths = 1;
    std::int64_t mss = 934;
    std::int64_t packet_size = 1000; // wire bytes per segment
    std::string scheduler = "fifo";
    std::uint64_t rng_seed = 1;
    std::uint64_t rng_stream = 0; // tie-break stream for the scheduler
};

struct DeltaUpdate {
    int i;
    int j;
    SimTime delta;
};

// Multipath sender: a shared send buffer feeding per-path AIMD subflows
// through a pull scheduler. Data is handed to a subflow only when its window
// opens (one scheduler query per MSS slot); ACKs drive window growth, RTT and
// throughput tracking, the forward-delay estimator, and loss recovery
// (SACK-hinted fast retransmit plus RTO).
class MptcpSender {
public:
    using TransmitFn = std::function<void(const DataPacket&)>;

    MptcpSender(EventQueue& events, SenderConfig cfg, TransmitFn transmit)
        : events_(events),
          cfg_(std::move(cfg)),
          transmit_(std::move(transmit)),
          estimator_(cfg_.n_paths),
          telemetry_(static_cast<std::size_t>(cfg_.n_paths)) {
        if (cfg_.n_paths < 1) {
            throw std::invalid_argument("MptcpSender: need at least one path");
        }
        subflows_.resize(static_cast<std::size_t>(cfg_.n_paths));
        for (int p = 0; p < cfg_.n_paths; ++p) {
            subflows_[static_cast<std::size_t>(p)].init(p, cfg_.mss);
        }
        scheduler_ = make_scheduler(cfg_.scheduler, cfg_.n_paths, estimator_, telemetry_, cfg_.mss,
                                    RngStream(cfg_.rng_seed, cfg_.rng_stream));
    }

    // Greedy application: data is available from t = 0 and never runs out.
    void start() {
        events_.schedule(events_.now(), EventKind::app_data_available, [this] {
            for (int p = 0; p < cfg_.n_paths; ++p) {
                try_send(p);
            }
        });
    }

    void on_ack(int path_id, const AckPacket& ack) {
        Subflow& sf = subflows_.at(static_cast<std::size_t>(path_id));
        ++sf.acks_seen;
        const SimTime now = events_.now();

        // Retire every transmission whose data is now covered, on any path
        // (the cumulative/SACK state is connection-level).
        std::vector<std::vector<AckedTx>> newly(subflows_.size());
        std::int64_t total_newly = 0;
        for (Subflow& q : subflows_) {
            for (SegmentRecord& rec : q.outstanding) {
                if (rec.acked) continue;
                if (!covers(ack, rec.data_seq)) continue;
                rec.acked = true;
                if (!rec.lost) {
                    q.inflight -= q.mss;
                }
                newly[static_cast<std::size_t>(q.path_id)].push_back(AckedTx{rec.subflow_seq});
                ++total_newly;
            }
        }
        // Queued retransmissions whose data is now covered are pointless.
        buffer_.remove_pending_if([&ack](std::int64_t s) { return covers(ack, s); });

        // RTT, estimator and throughput samples come from the transmission
        // that triggered this ACK, identified by matching the echoed send
        // timestamp against the path's pending echoes. This stays meaningful
        // even when the data itself was already retired through another
        // path's ACK stream. ACKs triggered by duplicate arrivals echo an
        // already-consumed or retransmitted copy and feed nothing.
        bool matched = false;
        EchoRecord echo;
        std::int64_t delivered_with = 0; // covered predecessors whose own acks were lost
        while (!sf.awaiting_echo.empty()) {
            const EchoRecord& front = sf.awaiting_echo.front();
            if (front.ts_sent > ack.echo_ts_sent) break; // stale echo
            if (front.ts_sent == ack.echo_ts_sent) {
                echo = front;
                sf.awaiting_echo.pop_front();
                matched = true;
                break;
            }
            if (covers(ack, front.data_seq)) ++delivered_with;
            sf.awaiting_echo.pop_front();
        }
        if (matched) {
            if (!echo.retransmission) {
                sf.rtt.sample(now - echo.ts_sent);
                if (!sf.throughput_seeded) {
                    sf.throughput_bps = static_cast<double>(sf.cwnd) / to_seconds(sf.rtt.srtt());
                    sf.throughput_seeded = true;
                }
                estimator_.ingest(PathSample{path_id, echo.ts_sent, ack.ts_received});
                refresh_stale_horizon();
            }
            update_throughput(sf, 1 + delivered_with, ack.ts_received);
        }

        if (total_newly == 0) {
            ++sf.stale_acks; // window, recovery and timers only move on new data
            sync_telemetry();
            return;
        }

        // SACK-style loss hints: an unacked transmission with three or more
        // later same-path transmissions acknowledged is treated as lost.
        for (Subflow& q : subflows_) {
            const auto& acked_here = newly[static_cast<std::size_t>(q.path_id)];
            if (acked_here.empty()) continue;
            for (const AckedTx& a : acked_here) {
                for (SegmentRecord& u : q.outstanding) {
                    if (u.subflow_seq >= a.subflow_seq) break;
                    if (!u.acked && !u.lost) ++u.newer_acked;
                }
            }
            detect_losses(q);
        }

        for (Subflow& q : subflows_) {
            if (newly[static_cast<std::size_t>(q.path_id)].empty()) continue;
            q.grow_window_on_ack();
            pop_retired(q);
            if (q.in_recovery &&
                (q.outstanding.empty() || q.outstanding.front().subflow_seq > q.recovery_point)) {
                q.in_recovery = false;
                q.recovery_point = -1;
            }
            q.rto_backoff = 1;
            if (q.outstanding.empty()) {
                ++q.rto_generation; // disarm
            } else {
                arm_rto(q);
            }
        }

        sync_telemetry();
        for (int p = 0; p < cfg_.n_paths; ++p) {
            try_send(p);
        }
    }

    // --- observers ----------------------------------------------------------

    const Subflow& subflow(int p) const { return subflows_.at(static_cast<std::size_t>(p)); }
    const ForwardDelayEstimator& estimator() const { return estimator_; }
    Scheduler& scheduler() { return *scheduler_; }
    const SendBuffer& buffer() const { return buffer_; }

    std::uint64_t scheduler_queries() const { return scheduler_queries_; }
    std::uint64_t segments_sent() const { return segments_sent_; }
    std::uint64_t retransmissions() const { return retransmissions_; }
    std::uint64_t fast_retransmits() const {
        std::uint64_t n = 0;
        for (const Subflow& sf : subflows_) n += sf.fast_retransmits;
        return n;
    }

    void enable_delta_log() {
        estimator_.set_update_hook(
            [this](int i, int j, SimTime d) { delta_log_.push_back(DeltaUpdate{i, j, d}); });
    }
    const std::vector<DeltaUpdate>& delta_log() const { return delta_log_; }

private:
    struct AckedTx {
        std::int64_t subflow_seq;
    };

    static bool covers(const AckPacket& ack, std::int64_t seq) {
        if (seq <= ack.cum_data_ack) return true;
        const auto& rs = ack.sack_ranges;
        auto it = std::upper_bound(rs.begin(), rs.end(), seq,
                                   [](std::int64_t v, const SackRange& r) { return v < r.lo; });
        if (it == rs.begin()) return false;
        --it;
        return seq >= it->lo && seq <= it->hi;
    }

    void update_throughput(Subflow& sf, std::int64_t segments, SimTime rx_time) {
        if (sf.has_last_sample_rx_time) {
            const SimTime dt = rx_time - sf.last_sample_rx_time;
            if (dt > SimTime{0}) {
                const double rate = static_cast<double>(segments * cfg_.packet_size) / to_seconds(dt);
                if (sf.throughput_seeded) {
                    sf.throughput_bps += (rate - sf.throughput_bps) / 8.0;
                } else {
                    sf.throughput_bps = rate;
                    sf.throughput_seeded = true;
                }
            }
        }
        sf.last_sample_rx_time = rx_time;
        sf.has_last_sample_rx_time = true;
    }

    void detect_losses(Subflow& sf) {
        bool triggered = false;
        for (SegmentRecord& rec : sf.outstanding) {
            if (rec.acked || rec.lost || rec.newer_acked < 3) continue;
            if (!sf.in_recovery) {
                enter_recovery(sf);
                triggered = true;
            }
            write_off(sf, rec);
        }
        if (triggered) {
            ++sf.fast_retransmits;
            if (std::getenv("MPSCHED_RETX_SAME_PATH")) {
                // Fast retransmit on the losing path itself; the
                // single-segment exemption may briefly push inflight past cwnd.
                send_segment(sf, buffer_.take(0));
            }
            // Otherwise the requeued loss sits at index 0 and the next pull
            // (usually the shortest-forward-delay path) carries it.
        }
    }

    void enter_recovery(Subflow& sf) {
        sf.ssthresh = std::max(sf.inflight / 2, 2 * sf.mss);
        sf.cwnd = std::max(sf.ssthresh, sf.mss);
        sf.in_recovery = true;
        sf.recovery_point = sf.next_subflow_seq - 1;
    }

    // Takes a transmission out of the inflight account and queues its data
    // for retransmission at the front of the shared buffer.
    void write_off(Subflow& sf, SegmentRecord& rec) {
        rec.lost = true;
        sf.inflight -= sf.mss;
        buffer_.requeue_front(rec.data_seq);
    }

    void pop_retired(Subflow& sf) {
        while (!sf.outstanding.empty() &&
               (sf.outstanding.front().acked || sf.outstanding.front().lost)) {
            sf.outstanding.pop_front();
        }
    }

    void arm_rto(Subflow& sf) {
        const std::uint64_t gen = ++sf.rto_generation;
        SimTime rto = sf.rtt.rto() * sf.rto_backoff;
        if (rto > kMaxRto) rto = kMaxRto;
        const int path = sf.path_id;
        events_.schedule(events_.now() + rto, EventKind::timer_expiry,
                         [this, path, gen] { handle_rto(path, gen); });
    }

    // Timeout: everything outstanding on the path is written off and the
    // window collapses to one segment, which immediately pulls the oldest
    // requeued loss back onto the wire.
    void handle_rto(int path, std::uint64_t gen) {
        Subflow& sf = subflows_[static_cast<std::size_t>(path)];
        if (gen != sf.rto_generation || sf.outstanding.empty()) {
            return; // superseded or nothing outstanding
        }
        ++sf.timeouts;
        sf.ssthresh = std::max(sf.inflight / 2, 2 * sf.mss);
        sf.cwnd = sf.mss;
        sf.in_recovery = false;
        sf.recovery_point = -1;
        if (sf.rto_backoff < 64) sf.rto_backoff *= 2;

        for (SegmentRecord& rec : sf.outstanding) {
            if (!rec.acked && !rec.lost) {
                write_off(sf, rec);
            }
        }
        pop_retired(sf);
        try_send(path); // sends exactly one segment and re-arms the timer
    }

    void try_send(int path) {
        Subflow& sf = subflows_[static_cast<std::size_t>(path)];
        while (sf.window_has_room()) {
            if (pacing_ && sf.rtt.has_sample()) {
                const SimTime now = events_.now();
                if (now < sf.next_pace_time) {
                    arm_pace_timer(sf);
                    return;
                }
            }
            // Pending retransmissions outrank scheduling: whoever opens a
            // window slot first carries the oldest loss.
            if (buffer_.front_is_retransmission()) {
                send_segment(sf, buffer_.take(0));
            } else {
                SchedulerQuery query{path, buffer_.length(), events_.now()};
                ++scheduler_queries_;
                const std::int64_t idx = scheduler_->pick_index(query);
                if (idx < 0 || idx >= query.buffer_len) {
                    throw std::logic_error("scheduler returned index out of bounds");
                }
                send_segment(sf, buffer_.take(idx));
            }
            if (pacing_ && sf.rtt.has_sample()) {
                advance_pace_clock(sf);
            }
        }
    }

    // One segment's worth of credit at rate cwnd/srtt; the pacing clock
    // never lags more than one interval behind wall time.
    void advance_pace_clock(Subflow& sf) {
        const double rate = static_cast<double>(sf.cwnd) / to_seconds(sf.rtt.srtt());
        if (rate <= 0.0) return;
        const SimTime gap{static_cast<std::int64_t>(1e9 * static_cast<double>(cfg_.packet_size) / rate)};
        const SimTime now = events_.now();
        const SimTime base = sf.next_pace_time > now ? sf.next_pace_time : now;
        sf.next_pace_time = base + gap;
    }

    void arm_pace_timer(Subflow& sf) {
        if (sf.pace_timer_armed) return;
        sf.pace_timer_armed = true;
        const int path = sf.path_id;
        events_.schedule(sf.next_pace_time, EventKind::timer_expiry, [this, path] {
            Subflow& s = subflows_[static_cast<std::size_t>(path)];
            s.pace_timer_armed = false;
            try_send(path);
        });
    }

    void send_segment(Subflow& sf, SendBuffer::Segment seg) {
        const bool was_idle = sf.outstanding.empty();
        SegmentRecord rec;
        rec.subflow_seq = sf.next_subflow_seq++;
        rec.data_seq = seg.data_seq;
        rec.ts_sent = events_.now();
        rec.retransmission = seg.retransmission;
        sf.outstanding.push_back(rec);
        sf.awaiting_echo.push_back(EchoRecord{rec.ts_sent, rec.data_seq, rec.retransmission});
        sf.inflight += sf.mss;

        ++sf.segments_sent;
        ++segments_sent_;
        if (seg.retransmission) {
            ++sf.retransmissions;
            ++retransmissions_;
        }

        DataPacket pkt;
        pkt.data_seq = seg.data_seq;
        pkt.subflow_seq = rec.subflow_seq;
        pkt.path_id = sf.path_id;
        pkt.size_bytes = cfg_.packet_size;
        pkt.ts_sent = rec.ts_sent;
        pkt.is_retransmission = seg.retransmission;
        transmit_(pkt);

        if (was_idle) {
            arm_rto(sf);
        }
    }

    void refresh_stale_horizon() {
        SimTime max_srtt{0};
        for (const Subflow& sf : subflows_) {
            if (sf.rtt.has_sample() && sf.rtt.srtt() > max_srtt) {
                max_srtt = sf.rtt.srtt();
            }
        }
        if (max_srtt > SimTime{0}) {
            estimator_.set_stale_after(3 * max_srtt);
        }
    }

    void sync_telemetry() {
        for (std::size_t p = 0; p < subflows_.size(); ++p) {
            const Subflow& sf = subflows_[p];
            telemetry_[p].srtt = sf.rtt.has_sample() ? sf.rtt.srtt() : SimTime{0};
            telemetry_[p].throughput_bps = sf.throughput_bps;
        }
    }

    static constexpr SimTime kMaxRto = std::chrono::seconds{60};

    EventQueue& events_;
    SenderConfig cfg_;
    TransmitFn transmit_;
    SendBuffer buffer_;
    std::vector<Subflow> subflows_;
    ForwardDelayEstimator estimator_;
    std::vector<PathTelemetry> telemetry_;
    std::unique_ptr<Scheduler> scheduler_;
    std::vector<DeltaUpdate> delta_log_;

    std::uint64_t scheduler_queries_ = 0;
    std::uint64_t segments_sent_ = 0;
    std::uint64_t retransmissions_ = 0;
    bool pacing_ = std::getenv("MPSCHED_PACING") != nullptr;
};

} // namespace mpsched
