#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "estimates.hpp"
#include "rng.hpp"

namespace mhd2d::probes {

/// Random field synthesized in spectral space: unit-scale random coefficients
/// on 0 < |k| <= k_max, zero mean. Deterministic for a given seed.
inline ScalarField random_spectral_field(const Grid& g, int k_max, SplitMix64& rng) {
    Spectrum s;
    s.n = g.n;
    s.c.assign(static_cast<size_t>(g.n) * (g.n / 2 + 1), {0.0, 0.0});
    for (int iy = 0; iy < g.n; ++iy) {
        const double ky = wavenumber(iy, g.n);
        for (int ix = 0; ix <= g.n / 2; ++ix) {
            const double k2 = static_cast<double>(ix) * ix + ky * ky;
            if (k2 == 0.0 || k2 > static_cast<double>(k_max) * k_max) continue;
            s.at(iy, ix) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        }
    }
    // Re-impose the Hermitian constraint on the self-conjugate columns.
    for (int ix : {0, g.n / 2}) {
        s.at(0, ix).imag(0.0);
        s.at(g.n / 2, ix).imag(0.0);
        for (int iy = 1; iy < g.n / 2; ++iy) s.at(g.n - iy, ix) = std::conj(s.at(iy, ix));
    }
    return fft_inverse(std::move(s), g);
}

inline VectorField2 random_spectral_vector(const Grid& g, int k_max, SplitMix64& rng) {
    ScalarField x = random_spectral_field(g, k_max, rng);
    ScalarField y = random_spectral_field(g, k_max, rng);
    return {std::move(x), std::move(y)};
}

/// Largest Bernstein ratio (p = 2) over `count` seeded broadband fields and
/// every band of the partition.
inline double bernstein_sup(const Grid& g, const DyadicPartition& part, int count,
                            std::uint64_t seed, double p = 2.0) {
    SplitMix64 rng(seed);
    double sup = 0.0;
    for (int i = 0; i < count; ++i) {
        const ScalarField f = random_spectral_field(g, 3 * g.n / 8, rng);
        const double f_lp = norm_lp(f, p);
        for (int q = part.q_min + 1; q <= part.q_max; ++q) {
            const ScalarField band = delta_q(f, part, q);
            const double lp = norm_lp(band, p);
            if (lp <= 1e-13 * f_lp) continue;
            sup = std::max(sup, norm_linf(band) / (std::pow(2.0, 2.0 * q / p) * lp));
        }
    }
    return sup;
}

/// Lacunary stress field: sum over j = 1..m of m^(-1/2) cos(2^j x). Its
/// W^{1,q} norm grows with m while the gradient L2 norm tracks it, which is
/// the regime the logarithmic inequality is sharp in.
inline ScalarField lacunary_field(const Grid& g, int m) {
    ScalarField f(g);
    const double amp = 1.0 / std::sqrt(static_cast<double>(m));
    for (int j = 1; j <= m; ++j) {
        const double k = std::ldexp(1.0, j);
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) f.at(iy, ix) += amp * std::cos(k * g.coord(ix));
    }
    return f;
}

/// Largest log-Sobolev ratio over the lacunary family (up to the Nyquist
/// band) plus seeded random fields.
inline double log_sobolev_sup(const Grid& g, double q, int random_count, std::uint64_t seed) {
    double sup = 0.0;
    const int m_max = static_cast<int>(std::log2(g.n / 2.0));
    for (int m = 1; m <= m_max; ++m)
        sup = std::max(sup, log_sobolev_ratio(lacunary_field(g, m), q));
    SplitMix64 rng(seed);
    for (int i = 0; i < random_count; ++i)
        sup = std::max(sup, log_sobolev_ratio(random_spectral_field(g, g.n / 4, rng), q));
    return sup;
}

inline double stokes_sup(const Grid& g, double q, int count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double sup = 0.0;
    for (int i = 0; i < count; ++i)
        sup = std::max(sup, stokes_regularity_probe(random_spectral_vector(g, g.n / 4, rng), q));
    return sup;
}

inline double poisson_sup(const Grid& g, double q, int count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double sup = 0.0;
    for (int i = 0; i < count; ++i)
        sup = std::max(sup, poisson_regularity_probe(random_spectral_vector(g, g.n / 4, rng), q));
    return sup;
}

/// Seeded random subwindows of [t0, t1] with length at least min_span.
inline std::vector<std::pair<double, double>> random_windows(double t0, double t1, int count,
                                                             double min_span,
                                                             std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        double a = rng.uniform(t0, t1);
        double b = rng.uniform(t0, t1);
        if (a > b) std::swap(a, b);
        if (b - a >= min_span) out.emplace_back(a, b);
    }
    return out;
}

/// Velocity samples of a trajectory, the input to the time-integrated ratio.
inline std::vector<TimeSample<VectorField2>> velocity_series(const Trajectory& traj) {
    std::vector<TimeSample<VectorField2>> out;
    out.reserve(traj.size());
    for (const State& s : traj.states) out.push_back({s.t, s.u});
    return out;
}

/// Largest time-integrated ratio over seeded windows of a stored trajectory.
inline double time_integrated_sup(const Trajectory& traj, double q, int window_count,
                                  std::uint64_t seed) {
    const auto series = velocity_series(traj);
    const auto windows =
        random_windows(traj.t_begin(), traj.t_end(), window_count,
                       10.0 * traj.dt_snapshot, seed);
    double sup = 0.0;
    for (const auto& [s, t] : windows)
        sup = std::max(sup, time_integrated_ratio(series, s, t, q));
    return sup;
}

}  // namespace mhd2d::probes
