#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace corematch {

/// Counter-based 64-bit generator (SplitMix64). A stream is identified by
/// (master_seed, stream_index); distinct pairs give statistically independent
/// sequences, identical pairs reproduce bit-identical output. Streams derive
/// sub-streams without consuming state, so a trial can hand independent
/// generators to each sampling phase.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : seed_(mix(master_seed ^ mix(stream_index + kGamma))), state_(seed_) {}

    /// Next 64 uniform bits.
    std::uint64_t next() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_positive_unit() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), exact (rejection sampling).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("RngStream::next_below: bound must be positive");
        const std::uint64_t threshold = -bound % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Child stream derived from this stream's identity, independent of how
    /// much of this stream has been consumed.
    RngStream substream(std::uint64_t index) const { return RngStream(seed_, index); }

    /// Derived 64-bit seed identifying this stream (logged per trial).
    std::uint64_t stream_seed() const { return seed_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace corematch
