#pragma once

#include <cstdint>

namespace rvehom {

/// Counter-based pseudo-random generator.
///
/// Output i of a stream is a pure function of (key, i), so draws can be
/// replayed or skipped without sequential state. The mixer is the SplitMix64
/// finalizer over a Weyl sequence, which makes each stream equivalent to a
/// SplitMix64 generator seeded with the stream key.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(derive_key(seed, stream)) {}

    /// SplitMix64 avalanche mixer.
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix(mix(seed + kGolden) ^ (stream * kGolden + 1));
    }

    std::uint64_t next() {
        std::uint64_t x = key_ + (++counter_) * kGolden;
        return mix(x);
    }

    /// Unbiased draw from {0, ..., bound-1} by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r < limit || limit == 0) return r % bound;
        }
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t position() const { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Derives an independent master seed for a tagged sub-experiment (e.g. one
/// cell count L of a sweep) so that sweeps never share draw streams.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t tag) {
    return CounterRng::mix(CounterRng::mix(master_seed ^ 0x5851f42d4c957f2dull) + tag);
}

} // namespace rvehom
