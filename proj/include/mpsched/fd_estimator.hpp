#pragma once

#include "mpsched/time.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mpsched {

// One (send, receive) timestamp pair observed on a path. ts_sent is in the
// sender's clock, ts_received in the receiver's clock; the two clocks may
// disagree by an arbitrary constant offset.
struct PathSample {
    int path_id = 0;
    SimTime ts_sent{0};
    SimTime ts_received{0};
};

// Forward-delay difference between the paths of two samples, a on path i and
// b on path j: (send-time difference) minus (receive-time difference). Any
// constant receiver clock offset appears in both receive timestamps and
// cancels, so the result equals T_i - T_j of the true one-way delays without
// any clock synchronization. Negative means path i is faster.
inline SimTime raw_forward_delay_delta(const PathSample& a, const PathSample& b) {
    const SimTime delta_s = b.ts_sent - a.ts_sent;
    const SimTime delta_r = b.ts_received - a.ts_received;
    return delta_s - delta_r;
}

// Maintains the smoothed pairwise forward-delay-difference matrix. Each new
// sample pairs with the latest retained sample of every other path; raw
// differences are folded in with an EWMA (alpha = 1/4, integer arithmetic).
// The matrix is antisymmetric by construction with a zero diagonal.
class ForwardDelayEstimator {
public:
    // Called after each pair update with (i, j, smoothed delta_ij).
    using UpdateHook = std::function<void(int, int, SimTime)>;

    explicit ForwardDelayEstimator(int n_paths, SimTime stale_after = SimTime::max())
        : n_(n_paths), stale_after_(stale_after) {
        if (n_paths < 1) {
            throw std::invalid_argument("ForwardDelayEstimator: need at least one path");
        }
        pair_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
        paths_.resize(static_cast<std::size_t>(n_));
    }

    void ingest(const PathSample& s) {
        if (s.path_id < 0 || s.path_id >= n_) {
            throw std::out_of_range("ForwardDelayEstimator::ingest: bad path id");
        }
        PathState& st = paths_[static_cast<std::size_t>(s.path_id)];
        st.history[st.history_next] = s;
        st.history_next = (st.history_next + 1) % kHistory;
        if (st.history_len < kHistory) ++st.history_len;
        st.latest = s;
        st.has_sample = true;
        st.last_seen = s.ts_sent;

        for (int j = 0; j < n_; ++j) {
            if (j == s.path_id) continue;
            const PathState& other = paths_[static_cast<std::size_t>(j)];
            if (!other.has_sample) continue;
            // Pair with the retained sample sent closest in time to this
            // one: the difference arithmetic is exact for any pair, but a
            // smaller send-time skew means less queue drift between the two
            // crossings.
            update_pair(s.path_id, j, raw_forward_delay_delta(s, closest_by_send_time(other, s.ts_sent)));
        }
    }

    // Smoothed delta for (i, j); NoEstimate (nullopt) until both paths have
    // produced a sample.
    std::optional<SimTime> delta_between(int i, int j) const {
        if (i == j) return SimTime{0};
        const PairState& st = at(i, j);
        if (!st.has) return std::nullopt;
        return st.delta;
    }

    // Staleness-aware variant: a path silent for longer than the stale
    // horizon reports NoEstimate for all its pairs.
    std::optional<SimTime> delta_between(int i, int j, SimTime now) const {
        if (i == j) return SimTime{0};
        if (is_stale(i, now) || is_stale(j, now)) return std::nullopt;
        return delta_between(i, j);
    }

    void set_stale_after(SimTime d) { stale_after_ = d; }
    void set_update_hook(UpdateHook hook) { hook_ = std::move(hook); }

    int n_paths() const { return n_; }

    bool has_sample(int path) const {
        return paths_[static_cast<std::size_t>(path)].has_sample;
    }

private:
    static constexpr int kHistory = 8;

    struct PathState {
        std::array<PathSample, kHistory> history{};
        int history_next = 0;
        int history_len = 0;
        PathSample latest{};
        bool has_sample = false;
        SimTime last_seen{0};
    };

    struct PairState {
        SimTime delta{0};
        bool has = false;
    };

    PairState& at(int i, int j) {
        return pair_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }
    const PairState& at(int i, int j) const {
        return pair_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }

    static const PathSample& closest_by_send_time(const PathState& st, SimTime ts) {
        const PathSample* best = &st.latest;
        SimTime best_skew = abs_delta(st.latest.ts_sent, ts);
        for (int k = 0; k < st.history_len; ++k) {
            const PathSample& cand = st.history[static_cast<std::size_t>(k)];
            const SimTime skew = abs_delta(cand.ts_sent, ts);
            if (skew < best_skew) {
                best_skew = skew;
                best = &cand;
            }
        }
        return *best;
    }

    static SimTime abs_delta(SimTime a, SimTime b) { return a > b ? a - b : b - a; }

    bool is_stale(int path, SimTime now) const {
        const PathState& st = paths_[static_cast<std::size_t>(path)];
        if (!st.has_sample) return true;
        if (stale_after_ == SimTime::max()) return false;
        return now - st.last_seen > stale_after_;
    }

    void update_pair(int i, int j, SimTime raw) {
        PairState& fwd = at(i, j);
        if (!fwd.has) {
            fwd.delta = raw;
            fwd.has = true;
        } else {
            // alpha = 1/4: new = (3*old + raw) / 4. Truncating division is
            // symmetric in sign, so the mirrored entry stays an exact
            // negation.
            fwd.delta = SimTime{(3 * fwd.delta.count() + raw.count()) / 4};
        }
        PairState& rev = at(j, i);
        rev.delta = -fwd.delta;
        rev.has = true;
        if (hook_) hook_(i, j, fwd.delta);
    }

    int n_;
    SimTime stale_after_;
    std::vector<PairState> pair_;
    std::vector<PathState> paths_;
    UpdateHook hook_;
};

} // namespace mpsched
