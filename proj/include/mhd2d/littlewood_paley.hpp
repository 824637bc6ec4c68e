#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "norms.hpp"
#include "ramp.hpp"

namespace mhd2d {

/// Radial cutoff: 1 on |xi| <= 1, 0 on |xi| >= 4/3, smooth in between.
inline double chi_profile(double r) { return 1.0 - smooth_ramp(3.0 * (r - 1.0)); }

/// Ring profile supported in {1 <= |xi| <= 8/3}; together with chi it
/// telescopes to a partition of unity: chi(xi) + sum_q phi(2^-q xi) = 1.
inline double phi_profile(double r) { return chi_profile(0.5 * r) - chi_profile(r); }

/// Dyadic partition of unity sampled on the discrete frequency lattice.
///
/// chi holds chi(|k| / 2^(q_min+1)) and phi_band[q - q_min - 1] holds
/// phi(|k| / 2^q); both are stored on the half-plane spectrum layout so they
/// can act directly as Fourier multipliers.
struct DyadicPartition {
    Grid grid;
    int q_min = 0;
    int q_max = 0;
    std::vector<double> chi;
    std::vector<std::vector<double>> phi_band;

    int half() const { return grid.n / 2 + 1; }
    const std::vector<double>& band(int q) const {
        if (q < q_min + 1 || q > q_max)
            throw std::invalid_argument("DyadicPartition: band index out of range");
        return phi_band[static_cast<size_t>(q - q_min - 1)];
    }

    /// Pointwise evaluations on an arbitrary lattice frequency (for probes).
    double eval_chi(double kx, double ky) const {
        return chi_profile(std::hypot(kx, ky) / std::ldexp(1.0, q_min + 1));
    }
    double eval_phi(int q, double kx, double ky) const {
        return phi_profile(std::hypot(kx, ky) / std::ldexp(1.0, q));
    }
    double partition_sum(double kx, double ky) const {
        double s = eval_chi(kx, ky);
        for (int q = q_min + 1; q <= q_max; ++q) s += eval_phi(q, kx, ky);
        return s;
    }
};

/// Build the partition for a grid. The band range must cover the lattice:
/// 2^q_max >= n/2, so that the telescoped sum equals 1 below Nyquist.
inline DyadicPartition build_partition(const Grid& g, int q_min, int q_max) {
    if (q_min >= q_max)
        throw std::invalid_argument("build_partition: require q_min < q_max");
    if (std::ldexp(1.0, q_max) < g.n / 2.0)
        throw std::invalid_argument("build_partition: 2^q_max must reach the Nyquist ring");

    DyadicPartition part{g, q_min, q_max, {}, {}};
    const int n = g.n, half = n / 2 + 1;
    part.chi.resize(static_cast<size_t>(n) * half);
    part.phi_band.assign(static_cast<size_t>(q_max - q_min), {});
    for (auto& b : part.phi_band) b.resize(static_cast<size_t>(n) * half);

    for (int iy = 0; iy < n; ++iy) {
        const double ky = wavenumber(iy, n);
        for (int ix = 0; ix < half; ++ix) {
            const double mag = std::hypot(static_cast<double>(ix), ky);
            const size_t at = static_cast<size_t>(iy) * half + ix;
            part.chi[at] = chi_profile(mag / std::ldexp(1.0, q_min + 1));
            for (int q = q_min + 1; q <= q_max; ++q)
                part.phi_band[static_cast<size_t>(q - q_min - 1)][at] =
                    phi_profile(mag / std::ldexp(1.0, q));
        }
    }
    return part;
}

namespace detail {

inline ScalarField apply_lattice_multiplier(const ScalarField& f,
                                            const std::vector<double>& m) {
    Spectrum s = fft_forward(f);
    for (size_t i = 0; i < s.c.size(); ++i) s.c[i] *= m[i];
    return fft_inverse(std::move(s), f.grid);
}

}  // namespace detail

/// Frequency localization Delta_q: multiplier phi(2^-q |k|).
inline ScalarField delta_q(const ScalarField& f, const DyadicPartition& part, int q) {
    return detail::apply_lattice_multiplier(f, part.band(q));
}

/// Low-pass S_q: multiplier chi(2^-q |k|).
inline ScalarField s_q(const ScalarField& f, const DyadicPartition& part, int q) {
    if (q < part.q_min || q > part.q_max)
        throw std::invalid_argument("s_q: index out of range");
    Spectrum s = fft_forward(f);
    const double scale = std::ldexp(1.0, q);
    detail::for_each_mode(s, [&](int iy, int ix, std::complex<double>& z) {
        z *= chi_profile(std::hypot(static_cast<double>(ix), wavenumber(iy, s.n)) / scale);
    });
    return fft_inverse(std::move(s), f.grid);
}

/// Low part plus all ring parts; sums back to f on the covered lattice.
struct BandDecomposition {
    ScalarField low;
    std::vector<std::pair<int, ScalarField>> bands;
};

inline BandDecomposition band_decompose(const ScalarField& f, const DyadicPartition& part) {
    BandDecomposition out{detail::apply_lattice_multiplier(f, part.chi), {}};
    out.bands.reserve(static_cast<size_t>(part.q_max - part.q_min));
    for (int q = part.q_min + 1; q <= part.q_max; ++q)
        out.bands.emplace_back(q, delta_q(f, part, q));
    return out;
}

struct ThreePartSplit {
    ScalarField low;   // S_{-N-1} f
    ScalarField mid;   // sum of Delta_j f, |j| <= N
    ScalarField high;  // sum of Delta_j f, j > N
};

inline ThreePartSplit three_part_split(const ScalarField& f, const DyadicPartition& part,
                                       int band_count) {
    const int N = band_count;
    if (N < 1) throw std::invalid_argument("three_part_split: band count must be >= 1");
    if (part.q_min + 1 > -N || part.q_max < N)
        throw std::invalid_argument("three_part_split: bands [-N, N] not available");

    Spectrum s = fft_forward(f);
    Spectrum low = s, mid = s, high = std::move(s);
    const double low_scale = std::ldexp(1.0, -N - 1);
    detail::for_each_mode(low, [&](int iy, int ix, std::complex<double>& z) {
        z *= chi_profile(std::hypot(static_cast<double>(ix), wavenumber(iy, low.n)) /
                         low_scale);
    });
    auto ring_sum = [&](int j_from, int j_to, int iy, int ix) {
        const double mag = std::hypot(static_cast<double>(ix), wavenumber(iy, part.grid.n));
        double m = 0.0;
        for (int j = j_from; j <= j_to; ++j) m += phi_profile(mag / std::ldexp(1.0, j));
        return m;
    };
    detail::for_each_mode(mid, [&](int iy, int ix, std::complex<double>& z) {
        z *= ring_sum(-N, N, iy, ix);
    });
    detail::for_each_mode(high, [&](int iy, int ix, std::complex<double>& z) {
        z *= ring_sum(N + 1, part.q_max, iy, ix);
    });
    return {fft_inverse(std::move(low), f.grid), fft_inverse(std::move(mid), f.grid),
            fft_inverse(std::move(high), f.grid)};
}

/// kappa = min(2/q, 2(1/2 - 1/q)); positive only for q > 2, which is the
/// range where the band-count choice below is meaningful.
inline double kappa(double q) {
    if (!(q > 2.0)) throw std::invalid_argument("kappa: require q > 2");
    return std::min(2.0 / q, 2.0 * (0.5 - 1.0 / q));
}

/// N = floor( log_{2^kappa}( |f|_{W^{1,q}} / |grad f|_{L^2} ) ) + 1, clamped
/// to >= 1. Balances the low/high tails of the three-part split.
inline int optimal_band_count(double w1q_norm, double grad_l2_norm, double q) {
    if (!(w1q_norm > 0.0) || !(grad_l2_norm > 0.0))
        throw std::invalid_argument("optimal_band_count: norms must be positive");
    const double k = kappa(q);
    const int N = static_cast<int>(
                      std::floor(std::log(w1q_norm / grad_l2_norm) / (k * std::log(2.0)))) +
                  1;
    return std::max(N, 1);
}

/// |Delta_q f|_inf / ( 2^(2q/p) |Delta_q f|_p ). Uniform boundedness over q
/// is the discrete Bernstein statement.
inline double bernstein_ratio(const ScalarField& f, const DyadicPartition& part, int q,
                              double p) {
    const ScalarField band = delta_q(f, part, q);
    const double lp = norm_lp(band, p);
    // Bands holding only transform roundoff of an off-ring field count as empty.
    if (lp <= 1e-13 * std::max(norm_lp(f, p), 1e-300))
        throw std::invalid_argument("bernstein_ratio: band content is zero");
    return norm_linf(band) / (std::pow(2.0, 2.0 * q / p) * lp);
}

inline double log_plus(double x) { return std::max(std::log(x), 0.0); }

/// |f|_inf / ( 1 + |grad f|_L2 * sqrt(ln+ |f|_{W^{1,q}}) ).
inline double log_sobolev_ratio(const ScalarField& f, double q) {
    if (!(q > 2.0)) throw std::invalid_argument("log_sobolev_ratio: require q > 2");
    if (max_abs(f) == 0.0)
        throw std::invalid_argument("log_sobolev_ratio: field is identically zero");
    const double grad_l2 = norm_lp(gradient(f), 2.0);
    const double w1q = norm_sobolev(f, 1, q);
    return norm_linf(f) / (1.0 + grad_l2 * std::sqrt(log_plus(w1q)));
}

/// One sample of a time series of fields.
template <class FieldT>
struct TimeSample {
    double t;
    FieldT field;
};

namespace detail {

/// sqrt of the time integral of g(tau)^2 over [s, t], where g is known at the
/// sample stamps and g^2 is interpolated linearly in between. Splitting the
/// window at any interior point is exactly additive in the squares.
template <class FieldT, class SpatialNorm>
inline double l2_in_time(const std::vector<TimeSample<FieldT>>& series, double s, double t,
                         SpatialNorm&& spatial_norm) {
    if (series.empty()) throw std::invalid_argument("l2_in_time: empty series");
    if (!(s < t)) throw std::invalid_argument("l2_in_time: require s < t");
    if (s < series.front().t - 1e-12 || t > series.back().t + 1e-12)
        throw std::invalid_argument("l2_in_time: window not covered by the series");

    std::vector<double> stamps, sq;
    stamps.reserve(series.size());
    sq.reserve(series.size());
    for (const auto& sample : series) {
        stamps.push_back(sample.t);
        const double v = spatial_norm(sample.field);
        sq.push_back(v * v);
    }
    auto value_at = [&](double tau) {
        if (tau <= stamps.front()) return sq.front();
        if (tau >= stamps.back()) return sq.back();
        size_t j = 1;
        while (stamps[j] < tau) ++j;
        const double w = (tau - stamps[j - 1]) / (stamps[j] - stamps[j - 1]);
        return (1.0 - w) * sq[j - 1] + w * sq[j];
    };
    double acc = 0.0;
    double prev_t = s, prev_v = value_at(s);
    for (size_t j = 0; j < stamps.size(); ++j) {
        if (stamps[j] <= s || stamps[j] >= t) continue;
        acc += 0.5 * (prev_v + sq[j]) * (stamps[j] - prev_t);
        prev_t = stamps[j];
        prev_v = sq[j];
    }
    acc += 0.5 * (prev_v + value_at(t)) * (t - prev_t);
    return std::sqrt(acc);
}

}  // namespace detail

template <class FieldT>
inline double time_l2_linf(const std::vector<TimeSample<FieldT>>& series, double s, double t) {
    return detail::l2_in_time(series, s, t, [](const FieldT& f) { return norm_linf(f); });
}

template <class FieldT>
inline double time_l2_h1(const std::vector<TimeSample<FieldT>>& series, double s, double t) {
    return detail::l2_in_time(series, s, t, [](const FieldT& f) { return norm_hs(f, 1.0); });
}

template <class FieldT>
inline double time_l2_w1q(const std::vector<TimeSample<FieldT>>& series, double s, double t,
                          double q) {
    return detail::l2_in_time(series, s, t,
                              [q](const FieldT& f) { return norm_sobolev(f, 1, q); });
}

/// Time-integrated analogue of log_sobolev_ratio over the window [s, t]:
/// |f|_{L^2(s,t;Linf)} / ( 1 + |f|_{L^2(s,t;H^1)} sqrt(ln+ |f|_{L^2(s,t;W^{1,q})}) ).
template <class FieldT>
inline double time_integrated_ratio(const std::vector<TimeSample<FieldT>>& series, double s,
                                    double t, double q) {
    if (!(q > 2.0)) throw std::invalid_argument("time_integrated_ratio: require q > 2");
    const double num = time_l2_linf(series, s, t);
    const double h1 = time_l2_h1(series, s, t);
    const double w1q = time_l2_w1q(series, s, t, q);
    return num / (1.0 + h1 * std::sqrt(log_plus(w1q)));
}

}  // namespace mhd2d
