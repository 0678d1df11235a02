#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace netboot {

// SplitMix64 output function. Used both to expand seeds into generator state
// and to derive per-replicate seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for one replicate: splitmix64(master + 0x9E3779B97F4A7C15 * (id + 1)).
// A pure function of (master, id), so replicate streams never depend on the
// order or thread in which replicates run.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate_id) noexcept {
    return splitmix64(master + 0x9E3779B97F4A7C15ULL * (replicate_id + 1));
}

// xoshiro256** 1.0 (Blackman & Vigna). Portable and bit-reproducible, unlike
// the standard library distributions.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t z = seed;
        for (auto& word : s_) {
            word = splitmix64(z);
            z += 0x9E3779B97F4A7C15ULL;
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
    // rejection, so the result is exactly uniform.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (one of the pair is discarded).
    double normal() noexcept {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace netboot
