#pragma once

#include <cstdint>
#include <limits>

namespace monoquad {

/**
 * Counter-based random stream keyed by (seed, stream id).
 *
 * Draw i of a stream is a pure function of (seed, stream, i): the key is
 * mixed once from seed and stream, and outputs follow the SplitMix64
 * sequence from that key. Replication r of an experiment uses stream r,
 * so results never depend on which worker runs which replication.
 *
 * Satisfies std::uniform_random_bit_generator.
 */
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace monoquad
