#pragma once

#include "mpsched/rng.hpp"
#include "mpsched/time.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <variant>

namespace mpsched {

struct DropTailPolicy {};

// Random early detection. The drop probability is piecewise linear in the
// averaged queue fill: 0 below min_frac, max_drop_prob at max_frac, linear
// between, 1 above (no gentle segment). The queue length entering the curve
// is an exponentially weighted average, and accepted packets space drops out
// by uniformizing the probability, so transient bursts pass while sustained
// buildup sheds single well-separated packets.
struct RedPolicy {
    double min_frac = 0.25;
    double max_frac = 0.75;
    double max_drop_prob = 0.1;
    double ewma_weight = 0.002;
};

// The curve itself, on the averaged fill fraction.
inline double red_drop_curve(double fill, const RedPolicy& red) {
    if (fill < red.min_frac) return 0.0;
    if (fill > red.max_frac) return 1.0;
    if (red.max_frac == red.min_frac) return red.max_drop_prob;
    return red.max_drop_prob * (fill - red.min_frac) / (red.max_frac - red.min_frac);
}

struct QueueDiscipline {
    std::int64_t capacity_bytes = 0;
    std::variant<DropTailPolicy, RedPolicy> policy = DropTailPolicy{};
};

// Point-to-point pipe: FIFO queue + serializer + fixed propagation delay.
// Occupancy covers every byte not yet fully serialized and is drained lazily,
// so the model needs no engine callbacks of its own.
class Link {
public:
    struct Transmitted {
        SimTime departs; // serialization complete
        SimTime arrives; // departs + propagation
    };

    Link(std::int64_t bytes_per_sec, SimTime prop_delay, QueueDiscipline queue, RngStream drop_rng)
        : bandwidth_(bytes_per_sec),
          prop_delay_(prop_delay),
          queue_(queue),
          rng_(drop_rng) {
        if (bandwidth_ <= 0) {
            throw std::invalid_argument("Link: bandwidth must be positive");
        }
    }

    // Hands a packet to the link at `now`. Returns nullopt when the queue
    // policy rejects it. FIFO order is preserved within the link.
    std::optional<Transmitted> transmit(std::int64_t size_bytes, SimTime now) {
        if (size_bytes <= 0) {
            throw std::invalid_argument("Link::transmit: size must be positive");
        }
        drain(now);

        if (occupancy_ + size_bytes > queue_.capacity_bytes) {
            ++dropped_;
            return std::nullopt; // hard cap, both policies
        }
        if (const auto* red = std::get_if<RedPolicy>(&queue_.policy)) {
            update_avg_queue(*red, size_bytes, now);
            const double p = red_drop_curve(avg_queue_ / static_cast<double>(queue_.capacity_bytes),
                                            *red);
            if (p >= 1.0) {
                red_count_ = 0;
                ++dropped_;
                return std::nullopt;
            }
            if (p > 0.0) {
                const double spaced = p / (1.0 - std::min(0.9999, red_count_ * p));
                ++red_count_;
                if (rng_.next_unit() < spaced) {
                    red_count_ = 0;
                    ++dropped_;
                    return std::nullopt;
                }
            } else {
                red_count_ = 0;
            }
        }

        const SimTime start = next_free_ > now ? next_free_ : now;
        const SimTime departs = start + serialization_delay(size_bytes, bandwidth_);
        next_free_ = departs;
        occupancy_ += size_bytes;
        check_occupancy();
        in_serializer_.push_back({departs, size_bytes});

        ++accepted_;
        return Transmitted{departs, departs + prop_delay_};
    }

    std::int64_t occupancy_bytes(SimTime now) {
        drain(now);
        return occupancy_;
    }

    SimTime serialization_time(std::int64_t size_bytes) const {
        return serialization_delay(size_bytes, bandwidth_);
    }

    std::int64_t bandwidth() const { return bandwidth_; }
    SimTime prop_delay() const { return prop_delay_; }
    std::int64_t capacity_bytes() const { return queue_.capacity_bytes; }
    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t dropped() const { return dropped_; }

private:
    void drain(SimTime now) {
        while (!in_serializer_.empty() && in_serializer_.front().done <= now) {
            occupancy_ -= in_serializer_.front().bytes;
            in_serializer_.pop_front();
        }
        check_occupancy();
    }

    // EWMA on the instantaneous queue, with the idle gap counted as if that
    // many packets of the arriving size had seen an empty queue.
    void update_avg_queue(const RedPolicy& red, std::int64_t size_bytes, SimTime now) {
        if (occupancy_ == 0 && now > next_free_) {
            const double idle = to_seconds(now - next_free_);
            const double per_packet = to_seconds(serialization_delay(size_bytes, bandwidth_));
            if (per_packet > 0.0 && idle > 0.0) {
                avg_queue_ *= std::pow(1.0 - red.ewma_weight, idle / per_packet);
            }
        }
        avg_queue_ += red.ewma_weight * (static_cast<double>(occupancy_) - avg_queue_);
    }

    void check_occupancy() const {
        if (occupancy_ < 0 || occupancy_ > queue_.capacity_bytes) {
            throw std::logic_error("Link: occupancy out of [0, capacity]");
        }
    }

    struct Pending {
        SimTime done;
        std::int64_t bytes;
    };

    std::int64_t bandwidth_;
    SimTime prop_delay_;
    QueueDiscipline queue_;
    RngStream rng_;
    SimTime next_free_{0};
    std::int64_t occupancy_ = 0;
    double avg_queue_ = 0.0;
    std::int64_t red_count_ = 0;
    std::deque<Pending> in_serializer_;
    std::uint64_t accepted_ = 0;
    std::uint64_t dropped_ = 0;
};

} // namespace mpsched
