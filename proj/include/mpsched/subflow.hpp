#pragma once

#include "mpsched/time.hpp"

#include <cstdint>
#include <cstdlib>
#include <deque>

namespace mpsched {

// Standard exponential RTT smoothing (gains 1/8 and 1/4); the first sample
// sets srtt directly and rttvar to half of it.
class RttEstimator {
public:
    void sample(SimTime rtt) {
        if (!has_) {
            srtt_ = rtt;
            rttvar_ = rtt / 2;
            has_ = true;
            return;
        }
        const SimTime err = rtt > srtt_ ? rtt - srtt_ : srtt_ - rtt;
        rttvar_ = SimTime{(3 * rttvar_.count() + err.count()) / 4};
        srtt_ = SimTime{(7 * srtt_.count() + rtt.count()) / 8};
    }

    bool has_sample() const { return has_; }
    SimTime srtt() const { return srtt_; }
    SimTime rttvar() const { return rttvar_; }

    // srtt + 4*rttvar, floored at the minimum; 1 s before any sample.
    SimTime rto() const {
        if (!has_) return kInitialRto;
        const SimTime raw = srtt_ + 4 * rttvar_;
        return raw > kMinRto ? raw : kMinRto;
    }

    static constexpr SimTime kMinRto = std::chrono::milliseconds{200};
    static constexpr SimTime kInitialRto = std::chrono::seconds{1};

private:
    bool has_ = false;
    SimTime srtt_{0};
    SimTime rttvar_{0};
};

// One transmission of one segment on one path. A record is retired when its
// data_seq is acknowledged (on whatever path the data finally got through);
// newer_acked counts later transmissions on the same path already
// acknowledged while this one is still outstanding (SACK-style loss hint).
struct SegmentRecord {
    std::int64_t subflow_seq = 0;
    std::int64_t data_seq = 0;
    SimTime ts_sent{0};
    bool retransmission = false;
    bool acked = false;
    bool lost = false;
    int newer_acked = 0;
};

// Pending timestamp echo for one transmission. ACKs return per-path in FIFO
// order, so echoes consume this queue front to front; matching an echo
// identifies the exact transmission an ACK responds to even when the data
// itself was already retired by a faster path's ACK.
struct EchoRecord {
    SimTime ts_sent{0};
    std::int64_t data_seq = 0;
    bool retransmission = false;
};

// Per-path transport state: NewReno-style AIMD, kept deliberately simple and
// uncoupled across paths so the packet scheduler is the only variable under
// study.
struct Subflow {
    int path_id = 0;
    std::int64_t mss = 0;

    std::int64_t cwnd = 0;     // payload bytes
    std::int64_t ssthresh = 0; // payload bytes
    std::int64_t inflight = 0; // payload bytes not yet acked or written off

    RttEstimator rtt;

    // Smoothed delivery rate in wire bytes/s (EWMA gain 1/8 on per-ACK
    // samples), seeded with cwnd/srtt when the first RTT lands. Samples are
    // spaced by the receiver-clock reception times echoed in the ACKs: the
    // clock offset cancels in the difference and backward-path queueing
    // (ACK compression) cannot distort the measured forward rate.
    double throughput_bps = 0.0;
    bool throughput_seeded = false;

    SimTime last_sample_rx_time{0};
    bool has_last_sample_rx_time = false;

    std::int64_t next_subflow_seq = 0;
    std::deque<SegmentRecord> outstanding; // ordered by subflow_seq
    std::deque<EchoRecord> awaiting_echo;  // ordered by ts_sent (send order)

    bool in_recovery = false;
    std::int64_t recovery_point = -1;

    std::uint64_t rto_generation = 0;
    int rto_backoff = 1;

    // Transmissions are paced at cwnd/srtt once an RTT estimate exists, so
    // window-sized bursts never slam a queue in one serialization interval.
    SimTime next_pace_time{0};
    bool pace_timer_armed = false;

    // Counters
    std::uint64_t segments_sent = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t acks_seen = 0;
    std::uint64_t stale_acks = 0;

    void init(int path, std::int64_t mss_bytes) {
        path_id = path;
        mss = mss_bytes;
        cwnd = 2 * mss_bytes;
        ssthresh = std::int64_t{1} << 40;
        if (const char* env = std::getenv("MPSCHED_SSTHRESH0")) {
            ssthresh = std::atoll(env) * mss_bytes;
        }
    }

    bool window_has_room() const { return cwnd - inflight >= mss; }

    void grow_window_on_ack() {
        if (in_recovery) return;
        if (cwnd < ssthresh) {
            cwnd += mss; // slow start
        } else {
            const std::int64_t inc = (mss * mss) / cwnd;
            cwnd += inc > 0 ? inc : 1;
        }
    }
};

} // namespace mpsched
