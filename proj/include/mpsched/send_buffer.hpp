#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mpsched {

// Shared MPTCP send buffer, partitioned into MSS-sized segments indexed from
// 0. Removing index k shifts higher indices down. The application side is
// greedy: behind the explicitly tracked segments sits an endless tail of
// fresh sequence numbers, materialized lazily when a scheduler picks an index
// beyond the tracked prefix (which leaves holes the fast path later skips).
class SendBuffer {
public:
    struct Segment {
        std::int64_t data_seq;
        bool retransmission;
    };

    explicit SendBuffer(std::int64_t first_data_seq = 0)
        : fresh_horizon_(first_data_seq) {}

    // Removes and returns the segment at `index`, closing the gap.
    Segment take(std::int64_t index) {
        if (index < 0) {
            throw std::out_of_range("SendBuffer::take: negative index");
        }
        const auto tracked = static_cast<std::int64_t>(pending_.size());
        if (index < tracked) {
            Segment seg = pending_[static_cast<std::size_t>(index)];
            pending_.erase(pending_.begin() + index);
            return seg;
        }
        // Index lands in the fresh tail: everything skipped over stays
        // buffered (becomes tracked), the picked sequence is consumed.
        const std::int64_t picked = fresh_horizon_ + (index - tracked);
        for (std::int64_t s = fresh_horizon_; s < picked; ++s) {
            pending_.push_back(Segment{s, false});
        }
        fresh_horizon_ = picked + 1;
        return Segment{picked, false};
    }

    // Loss recovery path: a lost segment re-enters at the front of the
    // buffer. Entries stay sorted by data_seq, so the oldest outstanding
    // loss is always index 0. No-op if the sequence is already queued.
    bool requeue_front(std::int64_t data_seq) {
        if (data_seq >= fresh_horizon_) {
            throw std::logic_error("SendBuffer::requeue_front: sequence was never taken");
        }
        auto it = std::lower_bound(pending_.begin(), pending_.end(), data_seq,
                                   [](const Segment& s, std::int64_t v) { return s.data_seq < v; });
        if (it != pending_.end() && it->data_seq == data_seq) {
            return false;
        }
        pending_.insert(it, Segment{data_seq, true});
        return true;
    }

    // Drops every tracked segment the predicate covers. Tracked segments are
    // by definition unsent, so only requeued retransmissions can ever match
    // an acknowledgment.
    template <typename Pred>
    void remove_pending_if(Pred&& covered) {
        pending_.erase(std::remove_if(pending_.begin(), pending_.end(),
                                      [&](const Segment& s) { return covered(s.data_seq); }),
                       pending_.end());
    }

    // Drops a queued segment whose data got acknowledged before the
    // retransmission went out.
    bool remove_pending(std::int64_t data_seq) {
        auto it = std::lower_bound(pending_.begin(), pending_.end(), data_seq,
                                   [](const Segment& s, std::int64_t v) { return s.data_seq < v; });
        if (it == pending_.end() || it->data_seq != data_seq) {
            return false;
        }
        pending_.erase(it);
        return true;
    }

    // Retransmissions are requeued at the front and outrank scheduling.
    bool front_is_retransmission() const {
        return !pending_.empty() && pending_.front().retransmission;
    }

    bool contains(std::int64_t data_seq) const {
        auto it = std::lower_bound(pending_.begin(), pending_.end(), data_seq,
                                   [](const Segment& s, std::int64_t v) { return s.data_seq < v; });
        return it != pending_.end() && it->data_seq == data_seq;
    }

    // Length reported to schedulers. The greedy application keeps the buffer
    // effectively unbounded; the window constant only bounds index clamping.
    std::int64_t length() const {
        return static_cast<std::int64_t>(pending_.size()) + kFreshWindow;
    }

    std::int64_t tracked_size() const { return static_cast<std::int64_t>(pending_.size()); }
    std::int64_t fresh_horizon() const { return fresh_horizon_; }

    static constexpr std::int64_t kFreshWindow = 1'000'000;

private:
    std::vector<Segment> pending_; // sorted by data_seq, all < fresh_horizon_
    std::int64_t fresh_horizon_;
};

} // namespace mpsched
