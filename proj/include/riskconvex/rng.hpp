#pragma once

#include <cstdint>
#include <random>

namespace riskconvex {

// All randomness in the library flows through this header. Doubles are built
// from raw mt19937_64 output by bit manipulation, never through
// std::uniform_real_distribution, so that streams are bit-identical across
// standard libraries and platforms.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent substream seed; used for per-chunk parallel sampling.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Index in [0,n) by CDF-free rejection-less scaling (n small, bias negligible
    /// but kept exact via 64-bit multiply-shift).
    std::size_t next_index(std::size_t n) {
        // Lemire's multiply-shift; deterministic and unbiased enough for n << 2^32.
        return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace riskconvex
