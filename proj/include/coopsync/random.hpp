#ifndef COOPSYNC_RANDOM_HPP
#define COOPSYNC_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace coopsync {

/**
 * Seedable pseudo-random generator with a platform-stable stream.
 *
 * The standard library distributions are not bit-reproducible across
 * implementations, so everything here is spelled out: xoshiro256++ for the
 * raw 64-bit stream, splitmix64 for state expansion, Box-Muller for
 * Gaussians. Given the same seed, every platform produces the same draws.
 *
 * Stream layout (documented so that simulation trials stay reproducible):
 *   - uniform()        consumes one 64-bit word
 *   - normal()         consumes two words
 *   - complex_normal() consumes two words
 *
 * Independent substreams are derived with for_stream(master, index); the
 * Monte Carlo engine uses one substream per trial so the schedule of trials
 * across threads cannot change the draws.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    /// Counter-based substream derivation: mixes the master seed with the
    /// stream index through splitmix64 before seeding the generator state.
    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
        std::uint64_t s = stream_index + 0x9E3779B97F4A7C15ULL;
        const std::uint64_t mixed = master_seed ^ splitmix64(s);
        return Rng(mixed);
    }

    /// xoshiro256++ next value.
    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * (1.0 - uniform()); }

    /// Standard normal via Box-Muller (cosine branch).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance
    /// (real and imaginary parts i.i.d. with variance/2 each).
    std::complex<double> complex_normal(double variance) {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1) * variance);
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t& s) {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace coopsync

#endif  // COOPSYNC_RANDOM_HPP
