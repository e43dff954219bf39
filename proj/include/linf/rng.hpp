#pragma once

#include <cstdint>
#include <random>

namespace linf {

// SplitMix64 (Steele/Lea/Vigna). The constants below are part of the
// reproducibility contract: seeded experiment output must not change
// across releases.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives the seed of work item `index` from a master seed. Work items
// (Monte Carlo reps, per-n cells) get independent streams, so scheduling
// them across threads in any order reproduces the single-thread result.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

// mt19937_64 with a fixed uniform-double recipe. The engine's output
// sequence is pinned by the C++ standard, so draws are identical across
// platforms and standard-library versions for a given seed.
class Rng {
 public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0,1): top 53 bits scaled by 2^-53.
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
    std::mt19937_64 eng_;
};

}  // namespace linf
