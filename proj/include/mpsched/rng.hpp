#pragma once

#include <cstdint>

namespace mpsched {

// Deterministic random stream (splitmix64). A given (seed, stream_id) pair
// yields the same draw sequence on every platform; distinct stream ids never
// share state. Streams are handed out per queue, per scheduler, per flow so
// adding one consumer never perturbs another's draws.
class RngStream {
public:
    RngStream() = default;

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : state_(scramble(seed, stream_id)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 bits of mantissa.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Fair coin.
    bool next_bernoulli() {
        return (next_u64() >> 63) != 0;
    }

private:
    static std::uint64_t scramble(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (stream_id + 1));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

} // namespace mpsched
