#pragma once

#include <cstdint>

namespace pvass {

// SplitMix64 generator with counter-based stream splitting.
//
// Substreams are derived by hashing the (seed, a, b) triple through the
// SplitMix64 finalizer, so a trial's stream depends only on the triple and
// not on execution order. Parallel and serial runs therefore draw identical
// numbers: trial k of grid point n always uses substream(seed, n, k).
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = mix(seed);
        s = mix(s ^ (a * 0xd1342543de82ef95ULL));
        s = mix(s ^ (b * 0xaf251af3b0f025b5ULL));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound). bound must be positive. Uses rejection to stay
    // unbiased; bounds here are tiny relative to 2^64 so rejection is rare.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t draw = next_u64();
        while (draw >= limit) draw = next_u64();
        return draw % bound;
    }

private:
    std::uint64_t state_;
};

}  // namespace pvass
