#pragma once

#include <cstdint>
#include <map>
#include <optional>

namespace mpsched {

// Set of int64 values kept as disjoint, non-adjacent inclusive ranges.
// Backs the receiver's reorder buffer and its SACK blocks.
class IntervalSet {
public:
    using RangeMap = std::map<std::int64_t, std::int64_t>; // lo -> hi

    // Returns false if v was already present.
    bool insert(std::int64_t v) {
        auto next = ranges_.lower_bound(v);
        if (next != ranges_.begin()) {
            auto prev = std::prev(next);
            if (v <= prev->second) {
                return false; // covered
            }
            if (prev->second == v - 1) {
                // extend prev; maybe merge with next
                if (next != ranges_.end() && next->first == v + 1) {
                    prev->second = next->second;
                    ranges_.erase(next);
                } else {
                    prev->second = v;
                }
                ++count_;
                return true;
            }
        }
        if (next != ranges_.end() && next->first == v + 1) {
            const std::int64_t hi = next->second;
            ranges_.erase(next);
            ranges_.emplace(v, hi);
            ++count_;
            return true;
        }
        if (next != ranges_.end() && next->first == v) {
            return false;
        }
        ranges_.emplace(v, v);
        ++count_;
        return true;
    }

    bool contains(std::int64_t v) const {
        auto it = ranges_.upper_bound(v);
        if (it == ranges_.begin()) return false;
        --it;
        return v >= it->first && v <= it->second;
    }

    // If the lowest range starts exactly at lo, removes it and returns its hi.
    std::optional<std::int64_t> take_run_at(std::int64_t lo) {
        auto it = ranges_.begin();
        if (it == ranges_.end() || it->first != lo) {
            return std::nullopt;
        }
        const std::int64_t hi = it->second;
        count_ -= hi - lo + 1;
        ranges_.erase(it);
        return hi;
    }

    std::int64_t count() const { return count_; }
    bool empty() const { return ranges_.empty(); }
    const RangeMap& ranges() const { return ranges_; }

private:
    RangeMap ranges_;
    std::int64_t count_ = 0;
};

} // namespace mpsched
