#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace decentsim::rng {

// All random numbers in the library flow through Stream. Streams are keyed by
// a (seed, path...) tuple so that independent units of work (a Monte Carlo
// draw, a school, a pupil) own disjoint substreams and results do not depend
// on the order in which the work is scheduled.
//
// The variate transforms are written out by hand instead of using
// <random>'s distribution objects, whose output is implementation-defined;
// mt19937_64 itself is pinned by the standard, so byte-reproducibility holds
// across compilers.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (0x632be59bd9b4e019ULL + b);
    std::uint64_t h = splitmix64(s);
    return h;
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // uniform on [0, 1), 53-bit resolution
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // standard normal via Box-Muller; consumes exactly two uniforms per call
    double normal() {
        double u1 = 1.0 - uniform01(); // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // unbiased integer on [lo, hi]
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % range;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % range);
    }

private:
    std::mt19937_64 engine_;
};

// Derive a substream from a base seed and a path of indices.
inline Stream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix(seed, 0x5bf03635f0935ad1ULL);
    for (std::uint64_t p : path) h = mix(h, p);
    return Stream(h);
}

} // namespace decentsim::rng
