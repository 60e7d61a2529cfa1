// Deterministic pseudo-random source (splitmix64).  The standard-library
// distributions are implementation-defined, so every sampled verification
// point in the project comes through here to keep outputs reproducible.
#pragma once

#include <cstdint>

#include "cvqc/rational.hpp"

namespace cvqc {

class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed + 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Symmetric around zero, handy for random test points.
    double centered(double scale = 1.0) { return scale * (2.0 * uniform() - 1.0); }

    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Positive rational in roughly [1/4, 4]; numerators/denominators stay
    // small so exact arithmetic on sampled points cannot blow up.
    Rational positive_rational() {
        i64 num = 1 + i64(below(48));
        i64 den = 4 + i64(below(12));
        return Rational(num, den);
    }

    // Small signed rational for exact property tests.
    Rational signed_rational() {
        Rational r = positive_rational();
        return below(2) ? -r : r;
    }

  private:
    std::uint64_t state_;
};

} // namespace cvqc
