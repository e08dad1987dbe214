// Seeded random streams with fixed-width integer arithmetic so that runs are
// reproducible across platforms and language ports. The generator is
// SplitMix64 (Steele, Lea, Flood 2014): state advances by the golden-gamma
// constant and the output is finalized with two xor-shift multiplies.
#ifndef RIVERDP_RNG_HPP
#define RIVERDP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace riverdp {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Exponential with the given rate (> 0).
    double exponential(double rate) { return -std::log1p(-u01()) / rate; }

    // Uniform in [a, b].
    double uniform(double a, double b) { return a + (b - a) * u01(); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Independent per-path stream: decorrelates (seed, index) pairs by running the
// index through the same finalizer before seeding.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
}

} // namespace riverdp

#endif
