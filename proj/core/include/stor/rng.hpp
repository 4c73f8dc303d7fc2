#pragma once

#include <cmath>
#include <cstdint>

namespace stor {

// Counter-based random number generation. Every draw is addressed by a
// (seed, step, path, replicate, index) tuple, so simulations are
// reproducible regardless of evaluation order or thread count.
//
// The generator applies two rounds of the splitmix64 finalizer to the
// absorbed key; the output stream passes the statistical checks we need
// (moment tests in the unit suite) and is bijective per key component.

namespace rng {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream key identifying one logical random stream.
struct Key {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    std::uint64_t path = 0;
    std::uint64_t replicate = 0;
};

inline std::uint64_t bits(const Key& k, std::uint64_t index) {
    std::uint64_t h = mix(k.seed);
    h = mix(h ^ k.step);
    h = mix(h ^ k.path);
    h = mix(h ^ k.replicate);
    return mix(h ^ index);
}

/// Uniform draw in the open interval (0, 1).
inline double uniform(const Key& k, std::uint64_t index) {
    return (static_cast<double>(bits(k, index) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two indexed uniforms.
inline double normal(const Key& k, std::uint64_t index) {
    const double u1 = uniform(k, 2 * index);
    const double u2 = uniform(k, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Derive a child seed for a named sub-stream (design generation, scenario
/// databases, optimizer restarts, ...).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t domain, std::uint64_t index = 0) {
    return bits(Key{seed, domain, index, 0}, 0);
}

/// Small stateful engine for shuffles and scrambles, seeded from the
/// counter hierarchy. Satisfies UniformRandomBitGenerator.
class Engine {
public:
    using result_type = std::uint64_t;
    explicit Engine(std::uint64_t seed) : state_(mix(seed)) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }
    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }
    double uniform01() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return (*this)() % n; }

private:
    std::uint64_t state_;
};

}  // namespace rng
}  // namespace stor
