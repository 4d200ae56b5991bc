#pragma once

#include "mpsched/time.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mpsched {

enum class EventKind : std::uint8_t {
    packet_arrival,
    timer_expiry,
    app_data_available,
};

// Deterministic discrete-event loop. Events fire in (fire_at, seq_no) order;
// seq_no is the insertion sequence, so simultaneous events run in the order
// they were scheduled. A rolling FNV-1a hash over the dispatch stream lets
// callers assert two runs took identical trajectories.
class EventQueue {
public:
    SimTime now() const { return now_; }

    std::uint64_t schedule(SimTime fire_at, EventKind kind, std::function<void()> action) {
        if (fire_at < now_) {
            throw std::logic_error("EventQueue::schedule: event scheduled into the past");
        }
        const std::uint64_t seq = next_seq_++;
        heap_.push_back(Entry{fire_at, seq, kind, std::move(action)});
        std::push_heap(heap_.begin(), heap_.end(), FiresLater{});
        return seq;
    }

    // Dispatches every event with fire_at <= end (inclusive); returns the
    // number dispatched. The clock ends at max(last event, end).
    std::size_t run_until(SimTime end) {
        std::size_t dispatched = 0;
        while (!heap_.empty() && heap_.front().fire_at <= end) {
            std::pop_heap(heap_.begin(), heap_.end(), FiresLater{});
            Entry e = std::move(heap_.back());
            heap_.pop_back();

            now_ = e.fire_at;
            mix_into_hash(e);
            e.action();
            ++dispatched;
        }
        if (end > now_) {
            now_ = end;
        }
        return dispatched;
    }

    std::size_t pending() const { return heap_.size(); }
    std::uint64_t dispatched_total() const { return dispatched_total_; }
    std::uint64_t trace_hash() const { return hash_; }

private:
    struct Entry {
        SimTime fire_at;
        std::uint64_t seq;
        EventKind kind;
        std::function<void()> action;
    };

    // std::push_heap keeps a max-heap; "greater" entries fire later.
    struct FiresLater {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    void mix_into_hash(const Entry& e) {
        ++dispatched_total_;
        auto mix = [this](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                hash_ ^= (v >> (8 * i)) & 0xFFu;
                hash_ *= 0x100000001B3ull;
            }
        };
        mix(static_cast<std::uint64_t>(e.fire_at.count()));
        mix(e.seq);
        mix(static_cast<std::uint64_t>(e.kind));
    }

    std::vector<Entry> heap_;
    SimTime now_{0};
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_total_ = 0;
    std::uint64_t hash_ = 0xCBF29CE484222325ull;
};

} // namespace mpsched
