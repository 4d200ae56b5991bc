#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace mpsched {

// Simulation clock: signed integer nanoseconds since the run epoch.
// All event timing stays in integer arithmetic so a (config, seed) pair
// reproduces bit-identical runs across platforms. The same type carries
// signed quantities (clock offsets, forward-delay differences).
using SimTime = std::chrono::nanoseconds;

inline constexpr SimTime from_ms(std::int64_t v) { return std::chrono::milliseconds{v}; }
inline constexpr SimTime from_us(std::int64_t v) { return std::chrono::microseconds{v}; }
inline constexpr SimTime from_sec(std::int64_t v) { return std::chrono::seconds{v}; }

inline SimTime from_sec_f(double seconds) {
    return SimTime{std::llround(seconds * 1e9)};
}

inline SimTime from_ms_f(double ms) {
    return SimTime{std::llround(ms * 1e6)};
}

inline constexpr double to_seconds(SimTime t) {
    return static_cast<double>(t.count()) / 1e9;
}

// Time to push `size_bytes` onto a link of `bytes_per_sec`, rounded up to
// the next tick so a packet never finishes "early".
inline constexpr SimTime serialization_delay(std::int64_t size_bytes, std::int64_t bytes_per_sec) {
    const std::int64_t num = size_bytes * 1'000'000'000;
    return SimTime{(num + bytes_per_sec - 1) / bytes_per_sec};
}

} // namespace mpsched
