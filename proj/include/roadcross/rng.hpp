#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace roadcross {

// All randomness in the project flows through this wrapper. mt19937_64 output
// is fully specified by the standard, and the distribution transforms below
// are implemented by hand, so identical seeds produce identical streams on
// every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double unit() { return (engine_() >> 11) * 0x1.0p-53; }

    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Exponential inter-arrival gap for the given rate (events per unit time).
    double exponential(double rate) { return -std::log(1.0 - unit()) / rate; }

    // Uniform index in [0, n). Modulo bias is negligible for n << 2^64.
    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed, for per-lane or
// per-video substreams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(seed ^ splitmix64(stream));
}

} // namespace roadcross
