#pragma once
// Deterministic RNG streams for simulations.
//
// SplitMix64 is a counter-based generator (Weyl sequence + mix), which makes
// stream derivation trivial: every (seed, stream) pair gets an independent
// generator, so environment and policy draws never interleave.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace dal {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() { return mix64(state_ += kGolden); }

private:
    std::uint64_t state_;
};

// Independent sub-stream for (seed, stream). Streams with distinct ids are
// decorrelated by the mix64 avalanche.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix64(seed + kGolden * (stream + 1)));
}

// Uniform on [0, 1).
inline double uniform01(SplitMix64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(SplitMix64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

inline bool bernoulli(SplitMix64& g, double p) { return uniform01(g) < p; }

// Standard normal via Box-Muller. Two uniforms per draw, no cached spare, so
// the stream state after a draw does not depend on call parity.
inline double normal(SplitMix64& g) {
    const double u1 = 1.0 - uniform01(g);  // (0, 1]
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// Number of trials up to and including the first success, support {1, 2, ...}.
inline long geometric(SplitMix64& g, double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::domain_error("geometric: p must lie in (0,1]");
    if (p == 1.0) return 1;
    const double u = uniform01(g);
    const double k = std::floor(std::log1p(-u) / std::log1p(-p));
    if (k >= 9.0e18) return 9000000000000000000L;
    return 1L + static_cast<long>(k);
}

inline Eigen::VectorXd normal_vector(SplitMix64& g, int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = normal(g);
    return v;
}

inline Eigen::VectorXd uniform_cube(SplitMix64& g, int d, double lo, double hi) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = uniform(g, lo, hi);
    return v;
}

// Uniform draw from the radius-r ball in R^d.
inline Eigen::VectorXd uniform_ball(SplitMix64& g, int d, double radius) {
    Eigen::VectorXd dir = normal_vector(g, d);
    double n = dir.norm();
    while (n == 0.0) {
        dir = normal_vector(g, d);
        n = dir.norm();
    }
    const double r = radius * std::pow(uniform01(g), 1.0 / d);
    return dir * (r / n);
}

}  // namespace dal
