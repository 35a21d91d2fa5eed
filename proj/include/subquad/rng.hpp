#pragma once

#include "subquad/types.hpp"

#include <cmath>
#include <cstdint>

namespace subquad {

/// SplitMix64 generator (Steele, Lea & Flood 2014). Chosen over the
/// <random> engines+distributions because the standard does not pin down
/// distribution algorithms, and generated ensembles must reproduce
/// bit-for-bit across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; draws two uniforms per call and
    /// caches nothing so that the stream is position-independent.
    double gaussian() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    Vector gaussian_vector(Index d) {
        Vector v(d);
        for (Index i = 0; i < d; ++i) v(i) = gaussian();
        return v;
    }

    /// Uniform on the unit sphere in R^d (normalized Gaussian).
    Vector unit_sphere(Index d) {
        Vector v = gaussian_vector(d);
        double n = v.norm();
        while (n == 0.0) {  // astronomically unlikely
            v = gaussian_vector(d);
            n = v.norm();
        }
        return v / n;
    }

  private:
    std::uint64_t state_;
};

}  // namespace subquad
