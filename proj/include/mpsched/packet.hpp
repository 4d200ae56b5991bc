#pragma once

#include "mpsched/time.hpp"

#include <cstdint>
#include <vector>

namespace mpsched {

// One MSS-sized segment on the wire. data_seq is the connection-level
// sequence (MSS units); subflow_seq numbers transmissions on one path.
// ts_sent is stamped (sender clock) each time a copy is put on the wire,
// so retransmissions carry a fresh timestamp.
struct DataPacket {
    std::int64_t data_seq = 0;
    std::int64_t subflow_seq = 0;
    int path_id = 0;
    std::int64_t size_bytes = 0;
    SimTime ts_sent{0};
    bool is_retransmission = false;
};

struct SackRange {
    std::int64_t lo = 0; // inclusive data_seq bounds
    std::int64_t hi = 0;
};

// Emitted by the receiver for every arriving data packet (no delayed acks).
// cum_data_ack is the highest contiguously received data_seq (-1 if none);
// sack_ranges are the buffered out-of-order runs, all above cum_data_ack.
// echo_ts_sent comes back in sender-clock time, ts_received in receiver-clock
// time; together they drive the forward-delay estimator.
struct AckPacket {
    int path_id = 0;
    std::int64_t cum_data_ack = -1;
    std::vector<SackRange> sack_ranges;
    SimTime echo_ts_sent{0};
    SimTime ts_received{0};
};

} // namespace mpsched
