#ifndef GALLAB_RNG_HPP
#define GALLAB_RNG_HPP

#include <array>

#include "gallab/common.hpp"

// Seeded, bit-reproducible random number generation. Standard library
// engines are portable but the distributions are not, so uniform doubles
// and bounded integers are produced here from raw 64-bit words.

namespace gallab {

// Identifier recorded in experiment metadata alongside every seed.
inline constexpr const char* kRngAlgorithm = "splitmix64+xoshiro256++";

inline constexpr u64 kGoldenGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Stafford mix13 variant used by the reference code).
inline constexpr u64 mix64(u64 x) {
    x += kGoldenGamma;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based seed splitting: child i of a master seed is the splitmix64
// stream of the master evaluated at index i. O(1), documented, collision-free
// in the counter.
inline constexpr u64 child_seed(u64 master, u64 counter) {
    return mix64(master + kGoldenGamma * counter);
}

// xoshiro256++ 1.0, state seeded from splitmix64.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(u64 seed) {
        u64 x = seed;
        for (auto& word : state_) {
            x += kGoldenGamma;
            u64 z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            word = z ^ (z >> 31);
        }
    }

    u64 operator()() {
        const u64 result = rotl(state_[0] + state_[3], 23) + state_[0];
        const u64 t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static constexpr u64 rotl(u64 x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<u64, 4> state_{};
};

// Uniform in [0,1) with 53 random bits; 1.0 is never produced.
inline double uniform_unit(Xoshiro256pp& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection, bias-free. n must be >= 1.
inline u64 uniform_below(Xoshiro256pp& rng, u64 n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be >= 1");
    const u64 threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const u64 x = rng();
        if (x >= threshold) return x % n;
    }
}

}  // namespace gallab

#endif  // GALLAB_RNG_HPP
