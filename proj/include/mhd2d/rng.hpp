#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "field.hpp"

namespace mhd2d {

/// splitmix64: tiny deterministic generator with identical output on every
/// platform, which keeps seeded runs reproducible bit for bit.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

/// Random smooth field: superposition of lattice modes with |kx|,|ky| <= k_max,
/// random amplitudes in [-1, 1] and random phases. Zero mean.
inline ScalarField random_band_limited(const Grid& g, int k_max, SplitMix64& rng) {
    ScalarField f(g);
    for (int kx = 0; kx <= k_max; ++kx) {
        for (int ky = -k_max; ky <= k_max; ++ky) {
            if (kx == 0 && ky <= 0) continue;  // one representative per conjugate pair
            const double amp = rng.uniform(-1.0, 1.0);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi_v<double>);
            for (int iy = 0; iy < g.n; ++iy) {
                const double y = g.coord(iy);
                for (int ix = 0; ix < g.n; ++ix)
                    f.at(iy, ix) += amp * std::cos(kx * g.coord(ix) + ky * y + phase);
            }
        }
    }
    return f;
}

inline VectorField2 random_band_limited_vector(const Grid& g, int k_max, SplitMix64& rng) {
    return {random_band_limited(g, k_max, rng), random_band_limited(g, k_max, rng)};
}

}  // namespace mhd2d
