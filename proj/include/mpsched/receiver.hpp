#pragma once

#include "mpsched/interval_set.hpp"
#include "mpsched/packet.hpp"
#include "mpsched/time.hpp"

#include <cstdint>
#include <vector>

namespace mpsched {

// One entry per unique data packet arrival: the sequence that arrived and the
// re-sort buffer occupancy (in packets) right after delivery processing.
struct ArrivalEntry {
    std::int64_t data_seq;
    std::int64_t occupancy_after;
};

using ArrivalRecord = std::vector<ArrivalEntry>;

// Receive side: in-order delivery through an unbounded re-sort buffer, one
// ACK per arriving packet (duplicates included), and the arrival record the
// reordering metrics are computed from. The receiver's clock runs at a
// constant signed offset from the simulator clock; the offset shows up only
// in the ts_received it stamps into ACKs.
class Receiver {
public:
    struct DataResult {
        AckPacket ack;
        bool duplicate = false;
        std::int64_t occupancy_after = 0;
        // Contiguous run handed to the application by this arrival;
        // empty when delivered_hi < delivered_lo.
        std::int64_t delivered_lo = 0;
        std::int64_t delivered_hi = -1;
    };

    explicit Receiver(SimTime clock_offset = SimTime{0}, bool keep_record = true)
        : clock_offset_(clock_offset), keep_record_(keep_record) {}

    DataResult on_data(const DataPacket& pkt, SimTime now) {
        DataResult res;
        const std::int64_t seq = pkt.data_seq;

        if (seq < next_expected_ || buffered_.contains(seq)) {
            res.duplicate = true;
            ++duplicates_;
        } else if (seq == next_expected_) {
            res.delivered_lo = next_expected_;
            ++next_expected_;
            if (auto hi = buffered_.take_run_at(next_expected_)) {
                next_expected_ = *hi + 1;
            }
            res.delivered_hi = next_expected_ - 1;
            delivered_ += res.delivered_hi - res.delivered_lo + 1;
        } else {
            buffered_.insert(seq);
        }

        res.occupancy_after = buffered_.count();
        if (!res.duplicate && keep_record_) {
            record_.push_back(ArrivalEntry{seq, res.occupancy_after});
        }

        res.ack.path_id = pkt.path_id;
        res.ack.cum_data_ack = next_expected_ - 1;
        res.ack.sack_ranges.reserve(buffered_.ranges().size());
        for (const auto& [lo, hi] : buffered_.ranges()) {
            res.ack.sack_ranges.push_back(SackRange{lo, hi});
        }
        res.ack.echo_ts_sent = pkt.ts_sent;
        res.ack.ts_received = now + clock_offset_;
        return res;
    }

    std::int64_t next_expected() const { return next_expected_; }
    std::int64_t delivered() const { return delivered_; }
    std::int64_t duplicates() const { return duplicates_; }
    std::int64_t buffer_occupancy() const { return buffered_.count(); }
    const ArrivalRecord& record() const { return record_; }
    ArrivalRecord&& take_record() { return std::move(record_); }

private:
    SimTime clock_offset_;
    bool keep_record_;
    std::int64_t next_expected_ = 0;
    IntervalSet buffered_;
    ArrivalRecord record_;
    std::int64_t delivered_ = 0;
    std::int64_t duplicates_ = 0;
};

} // namespace mpsched
