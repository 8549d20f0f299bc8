#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tangle {

// Counter-based deterministic RNG (SplitMix64 finalizer). Streams are
// identified by a key; draws are a pure function of (key, counter), so
// results do not depend on platform or on how sibling streams interleave.
class Rng {
  public:
    explicit Rng(uint64_t key) : key_(key) {}

    // Derives a stream from (seed, k1, k2, ...) without consuming draws.
    static Rng keyed(std::initializer_list<uint64_t> keys) {
        uint64_t k = 0x6a09e667f3bcc909ull;
        for (uint64_t v : keys) k = mix(k ^ mix(v));
        return Rng(k);
    }

    // Independent substream; safe to call at any point in the draw sequence.
    Rng fork(uint64_t subkey) const {
        return Rng(mix(key_ ^ 0xda3e39cb94b95bdbull ^ mix(subkey)));
    }

    uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    // Uniform integer in [0, n); n must be positive.
    uint64_t below(uint64_t n) {
        // multiply-shift; bias is < 2^-64 per draw, identical on all platforms
        return static_cast<uint64_t>(
            (static_cast<__uint128_t>(next()) * n) >> 64);
    }

    // Uniform double in [0, 1) with 53 bits of randomness.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

    // Knuth inversion; intended for small lambda (event counts per genome).
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        double l = lambda;
        int count = 0;
        // split large lambda into chunks to avoid exp() underflow
        while (l > 30.0) {
            count += poisson_knuth(30.0);
            l -= 30.0;
        }
        return count + poisson_knuth(l);
    }

    uint64_t key() const { return key_; }

  private:
    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    int poisson_knuth(double lambda) {
        const double limit = std::exp(-lambda);
        double prod = unit();
        int count = 0;
        while (prod > limit) {
            ++count;
            prod *= unit();
        }
        return count;
    }

    uint64_t key_ = 0;
    uint64_t counter_ = 0;
};

}  // namespace tangle
