#ifndef ANCHOR_RNG_HPP
#define ANCHOR_RNG_HPP

#include "anchor/types.hpp"

#include <cmath>
#include <cstdint>

namespace anchor {

// Counter-based pseudorandom stream (splitmix64 core). Output i is a pure
// function of (key, i), so streams can be replayed, forked, and evaluated
// from many threads without shared state. Statistical quality is that of
// splitmix64, which is sufficient for Monte Carlo estimation.

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

class RngStream {
  public:
    explicit RngStream(Seed seed, std::uint64_t stream = 0)
        : key_(mix64(mix64(seed.value + 0x9E3779B97F4A7C15ULL) ^ mix64(stream))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix64(key_ + counter_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes two draws, no cached state.
    double normal() {
        double u1 = 1.0 - u01();  // (0, 1]
        double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Uniform integer in [0, n). Multiplicative reduction; bias is O(n/2^64).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return u01() < p; }

    Seed next_seed() { return Seed{next_u64()}; }

    /// Independent child stream; derived from the key only, so forks with
    /// distinct labels never overlap regardless of draw counts.
    RngStream fork(std::uint64_t label) const {
        RngStream child(Seed{0});
        child.key_ = mix64(key_ ^ mix64(label + 0xD1B54A32D192ED03ULL));
        child.counter_ = 0;
        return child;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Deterministic per-replication seed derivation from one master seed.
inline Seed derive_seed(Seed master, std::uint64_t index) {
    return Seed{mix64(mix64(master.value) ^ (index + 0x2545F4914F6CDD1DULL))};
}

}  // namespace anchor

#endif
