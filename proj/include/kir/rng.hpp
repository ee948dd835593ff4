#pragma once

#include <cstdint>
#include <vector>

namespace kir::rng {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used both as the core
// PRNG output function and as the mixer for deriving substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derives a substream seed from (seed, stream). Substreams of substreams
// give the two-level schemes used for per-replicate / per-center streams:
// derive(derive(seed, a), b).
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + kGoldenGamma * (stream + 1));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
}

// Fixed-algorithm 64-bit PRNG (SplitMix64). Chosen over std::mt19937_64
// so that the uniform-to-normal pipeline below is fully specified by this
// header and identical on every platform with IEEE doubles.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    // Uniform on [0, 1) from the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

// Inverse of the standard normal CDF, rational approximation due to
// Acklam (relative error < 1.2e-9 over (0,1)). Pure arithmetic, so the
// uniform -> normal map is bit-stable across platforms.
double inverse_normal_cdf(double p);

inline double next_normal(SplitMix64& gen) {
    // Shift the 53-bit uniform into (0,1) to keep the inverse CDF finite.
    const double u = (static_cast<double>(gen.next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return inverse_normal_cdf(u);
}

// Fisher-Yates with the fixed PRNG above (std::shuffle is
// implementation-defined and would break cross-run reproducibility).
std::vector<std::size_t> random_permutation(std::size_t n, SplitMix64& gen);

}  // namespace kir::rng
