#pragma once

#include "mpsched/event_queue.hpp"
#include "mpsched/link.hpp"
#include "mpsched/receiver.hpp"
#include "mpsched/scenario.hpp"
#include "mpsched/sender.hpp"

#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsched {

// Per-packet-kind accounting for one flow. Every injected packet copy ends
// up exactly one of arrived / dropped / still-in-flight; pending_hops tracks
// scheduled-but-unfired hop events so the reconciliation is a real check,
// not an identity.
struct PacketLedger {
    std::int64_t injected = 0;
    std::int64_t arrived = 0;
    std::int64_t dropped = 0;
    std::int64_t pending_hops = 0;

    bool reconciles() const {
        return pending_hops >= 0 && injected == arrived + dropped + pending_hops;
    }
};

struct RunResult {
    ArrivalRecord record;
    std::uint64_t trace_hash = 0;
    std::uint64_t events_dispatched = 0;

    std::int64_t delivered = 0;  // segments handed to the application, in order
    std::int64_t duplicates = 0; // duplicate arrivals at the receiver

    PacketLedger data;
    PacketLedger acks;

    std::uint64_t segments_sent = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t scheduler_queries = 0;

    std::vector<DeltaUpdate> delta_log;
};

struct SimulationOptions {
    bool log_delta_updates = false;
    bool keep_arrival_record = true;
};

// Builds the dumbbell-per-path topology for a scenario and runs one seeded
// simulation: the multipath flow under test plus single-path background
// flows sharing each bottleneck. Side links are private per flow endpoint;
// the two directional bottleneck links of a path are shared by everything
// crossing it. Router queues are sized to the bandwidth-delay product of the
// path's propagation round trip.
class Simulation {
public:
    static constexpr std::int64_t kAckBytes = 40;

    Simulation(const ScenarioConfig& cfg, std::uint64_t seed, SimulationOptions opts = {})
        : cfg_(cfg), seed_(seed), opts_(opts) {
        validate_scenario(cfg_);
        build();
    }

    RunResult run() {
        for (auto& c : connections_) {
            c->sender->start();
        }
        events_.run_until(from_sec_f(cfg_.sim_seconds));
        check_invariants();

        Connection& m = *connections_.front(); // the multipath flow under test
        RunResult out;
        out.record = m.receiver->take_record();
        out.trace_hash = events_.trace_hash();
        out.events_dispatched = events_.dispatched_total();
        out.delivered = m.receiver->delivered();
        out.duplicates = m.receiver->duplicates();
        out.data = m.data;
        out.acks = m.acks;
        out.segments_sent = m.sender->segments_sent();
        out.retransmissions = m.sender->retransmissions();
        out.fast_retransmits = m.sender->fast_retransmits();
        out.scheduler_queries = m.sender->scheduler_queries();
        out.delta_log = m.sender->delta_log();
        return out;
    }

    EventQueue& events() { return events_; }
    const MptcpSender& mptcp_sender() const { return *connections_.front()->sender; }
    std::deque<Link>& links() { return links_; } // diagnostics

private:
    struct Connection {
        std::unique_ptr<MptcpSender> sender;
        std::unique_ptr<Receiver> receiver;
        std::vector<std::vector<Link*>> fwd_chains; // per path: sender -> receiver
        std::vector<std::vector<Link*>> bwd_chains; // per path: receiver -> sender
        PacketLedger data;
        PacketLedger acks;
    };

    void build() {
        const int n = static_cast<int>(cfg_.paths.size());

        std::vector<Link*> bottleneck_fwd(cfg_.paths.size());
        std::vector<Link*> bottleneck_bwd(cfg_.paths.size());
        std::vector<std::int64_t> cap_fwd(cfg_.paths.size());
        std::vector<std::int64_t> cap_bwd(cfg_.paths.size());

        // One queue-sizing rule for every router in the experiment:
        // bandwidth-delay product of the link's own bandwidth and the
        // connection's largest propagation round trip. Sizing the short
        // path's queue by its own (small) RTT starves it outright once the
        // early-drop knee lands at two or three packets.
        SimTime rtt_max{0};
        for (const PathSpec& p : cfg_.paths) {
            const SimTime rtt = p.forward.delay + p.backward_or_mirror().delay +
                                4 * p.side_delay; // two side hops each way
            if (rtt > rtt_max) rtt_max = rtt;
        }
        const bool per_path_rtt = std::getenv("MPSCHED_QSIZE_PER_PATH") != nullptr;
        for (std::size_t i = 0; i < cfg_.paths.size(); ++i) {
            const PathSpec& p = cfg_.paths[i];
            const LinkSpec& bwd = p.backward_or_mirror();
            const SimTime rtt_prop =
                per_path_rtt ? p.forward.delay + bwd.delay + 4 * p.side_delay : rtt_max;
            cap_fwd[i] = queue_capacity(p.forward.bandwidth_bps, rtt_prop);
            cap_bwd[i] = queue_capacity(bwd.bandwidth_bps, rtt_prop);
            bottleneck_fwd[i] = new_link(p.forward.bandwidth_bps, p.forward.delay, p, cap_fwd[i]);
            bottleneck_bwd[i] = new_link(bwd.bandwidth_bps, bwd.delay, p, cap_bwd[i]);
        }

        // The multipath flow under test.
        {
            auto& c = add_connection(n, cfg_.scheduler, opts_.keep_arrival_record, cfg_.clock_offset);
            for (std::size_t i = 0; i < cfg_.paths.size(); ++i) {
                const PathSpec& p = cfg_.paths[i];
                const LinkSpec& bwd = p.backward_or_mirror();
                c.fwd_chains.push_back(side_wrapped(p, p.forward.bandwidth_bps, cap_fwd[i],
                                                    bottleneck_fwd[i]));
                c.bwd_chains.push_back(side_wrapped(p, bwd.bandwidth_bps, cap_bwd[i],
                                                    bottleneck_bwd[i]));
            }
        }

        // Background flows: plain long-lived single-path AIMD flows sharing
        // the bottlenecks. Forward flows push data alongside the multipath
        // data; backward flows push data against the multipath ACK stream.
        for (std::size_t i = 0; i < cfg_.paths.size(); ++i) {
            const PathSpec& p = cfg_.paths[i];
            const LinkSpec& bwd = p.backward_or_mirror();
            for (int k = 0; k < p.background_flows_fwd; ++k) {
                auto& c = add_connection(1, "fifo", false, SimTime{0});
                c.fwd_chains.push_back(side_wrapped(p, p.forward.bandwidth_bps, cap_fwd[i],
                                                    bottleneck_fwd[i]));
                c.bwd_chains.push_back(side_wrapped(p, bwd.bandwidth_bps, cap_bwd[i],
                                                    bottleneck_bwd[i]));
            }
            for (int k = 0; k < p.background_flows_bwd; ++k) {
                auto& c = add_connection(1, "fifo", false, SimTime{0});
                c.fwd_chains.push_back(side_wrapped(p, bwd.bandwidth_bps, cap_bwd[i],
                                                    bottleneck_bwd[i]));
                c.bwd_chains.push_back(side_wrapped(p, p.forward.bandwidth_bps, cap_fwd[i],
                                                    bottleneck_fwd[i]));
            }
        }
    }

    std::int64_t queue_capacity(std::int64_t bytes_per_sec, SimTime rtt) const {
        std::int64_t bdp = bytes_per_sec * rtt.count() / 1'000'000'000;
        if (const char* mult = std::getenv("MPSCHED_QCAP_MULT")) { // diagnostic only
            bdp = static_cast<std::int64_t>(static_cast<double>(bdp) * std::atof(mult));
        }
        std::int64_t floor_packets = 2; // never below two full packets
        if (const char* fp = std::getenv("MPSCHED_QFLOOR_PKTS")) {
            floor_packets = std::atoll(fp);
        }
        const std::int64_t floor = floor_packets * cfg_.packet_size;
        return bdp > floor ? bdp : floor;
    }

    Link* new_link(std::int64_t bps, SimTime delay, const PathSpec& p, std::int64_t capacity) {
        QueueDiscipline q;
        q.capacity_bytes = capacity;
        if (p.queue.policy == QueueSpec::Policy::red) {
            q.policy = RedPolicy{p.queue.red_min_frac, p.queue.red_max_frac,
                                 p.queue.red_max_drop_prob, p.queue.red_ewma_weight};
        } else {
            q.policy = DropTailPolicy{};
        }
        links_.emplace_back(bps, delay, q, RngStream(seed_, next_stream_++));
        return &links_.back();
    }

    // Private access links around a shared bottleneck.
    std::vector<Link*> side_wrapped(const PathSpec& p, std::int64_t bottleneck_bps,
                                    std::int64_t capacity, Link* bottleneck) {
        const auto side_bps =
            static_cast<std::int64_t>(std::llround(p.side_bandwidth_factor *
                                                   static_cast<double>(bottleneck_bps)));
        Link* in = new_link(side_bps, p.side_delay, p, capacity);
        Link* out = new_link(side_bps, p.side_delay, p, capacity);
        return {in, bottleneck, out};
    }

    Connection& add_connection(int n_paths, const std::string& scheduler, bool keep_record,
                               SimTime clock_offset) {
        const std::size_t ci = connections_.size();
        auto conn = std::make_unique<Connection>();
        conn->receiver = std::make_unique<Receiver>(clock_offset, keep_record);

        SenderConfig scfg;
        scfg.n_paths = n_paths;
        scfg.mss = cfg_.mss;
        scfg.packet_size = cfg_.packet_size;
        scfg.scheduler = scheduler;
        scfg.rng_seed = seed_;
        scfg.rng_stream = next_stream_++;
        conn->sender = std::make_unique<MptcpSender>(
            events_, scfg, [this, ci](const DataPacket& pkt) { inject_data(ci, pkt); });
        if (ci == 0 && opts_.log_delta_updates) {
            conn->sender->enable_delta_log();
        }
        connections_.push_back(std::move(conn));
        return *connections_.back();
    }

    void inject_data(std::size_t ci, const DataPacket& pkt) {
        Connection& c = *connections_[ci];
        ++c.data.injected;
        data_hop(ci, static_cast<std::size_t>(pkt.path_id), 0, pkt);
    }

    void data_hop(std::size_t ci, std::size_t path, std::size_t hop, const DataPacket& pkt) {
        Connection& c = *connections_[ci];
        const auto& chain = c.fwd_chains[path];
        const auto tx = chain[hop]->transmit(pkt.size_bytes, events_.now());
        if (!tx) {
            ++c.data.dropped;
            return;
        }
        ++c.data.pending_hops;
        events_.schedule(tx->arrives, EventKind::packet_arrival, [this, ci, path, hop, pkt] {
            Connection& conn = *connections_[ci];
            --conn.data.pending_hops;
            if (hop + 1 < conn.fwd_chains[path].size()) {
                data_hop(ci, path, hop + 1, pkt);
            } else {
                ++conn.data.arrived;
                const auto res = conn.receiver->on_data(pkt, events_.now());
                ++conn.acks.injected;
                ack_hop(ci, path, 0, res.ack);
            }
        });
    }

    void ack_hop(std::size_t ci, std::size_t path, std::size_t hop, const AckPacket& ack) {
        Connection& c = *connections_[ci];
        const auto& chain = c.bwd_chains[path];
        const auto tx = chain[hop]->transmit(kAckBytes, events_.now());
        if (!tx) {
            ++c.acks.dropped;
            return;
        }
        ++c.acks.pending_hops;
        events_.schedule(tx->arrives, EventKind::packet_arrival, [this, ci, path, hop, ack] {
            Connection& conn = *connections_[ci];
            --conn.acks.pending_hops;
            if (hop + 1 < conn.bwd_chains[path].size()) {
                ack_hop(ci, path, hop + 1, ack);
            } else {
                ++conn.acks.arrived;
                conn.sender->on_ack(static_cast<int>(path), ack);
            }
        });
    }

    void check_invariants() const {
        for (std::size_t ci = 0; ci < connections_.size(); ++ci) {
            const Connection& c = *connections_[ci];
            if (!c.data.reconciles() || !c.acks.reconciles()) {
                throw std::runtime_error("packet conservation violated on connection " +
                                         std::to_string(ci));
            }
            // In-order contract: everything delivered forms the contiguous
            // prefix [0, next_expected).
            if (c.receiver->delivered() != c.receiver->next_expected()) {
                throw std::runtime_error("delivery gap detected on connection " +
                                         std::to_string(ci));
            }
        }
    }

    ScenarioConfig cfg_;
    std::uint64_t seed_;
    SimulationOptions opts_;
    EventQueue events_;
    std::deque<Link> links_;
    std::vector<std::unique_ptr<Connection>> connections_;
    std::uint64_t next_stream_ = 0;
};

} // namespace mpsched
