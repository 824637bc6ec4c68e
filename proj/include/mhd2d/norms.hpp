#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spectral.hpp"

namespace mhd2d {

/// Equal-weight quadrature of f over the torus (trapezoid = rectangle on a
/// periodic grid, spectrally accurate for smooth integrands).
inline double integrate(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values) sum += v;
    const double h = f.grid.spacing();
    return sum * h * h;
}

inline double mean(const ScalarField& f) {
    return integrate(f) / (f.grid.length * f.grid.length);
}

namespace detail {

template <class MagnitudeSq>
inline double lp_from_square(const Grid& g, long count, double p, MagnitudeSq&& mag2) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (long i = 0; i < count; ++i) m = std::max(m, mag2(i));
        return std::sqrt(m);
    }
    const double h2 = g.spacing() * g.spacing();
    double sum = 0.0;
    if (p == 2.0) {
        for (long i = 0; i < count; ++i) sum += mag2(i);
        return std::sqrt(sum * h2);
    }
    if (p == 1.0) {
        for (long i = 0; i < count; ++i) sum += std::sqrt(mag2(i));
        return sum * h2;
    }
    for (long i = 0; i < count; ++i) sum += std::pow(mag2(i), 0.5 * p);
    return std::pow(sum * h2, 1.0 / p);
}

}  // namespace detail

/// L^p quadrature norm, p in [1, inf]; p = inf is the grid-point max.
inline double norm_lp(const ScalarField& f, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("norm_lp: p must satisfy p >= 1");
    return detail::lp_from_square(f.grid, f.grid.size(), p, [&](long i) {
        const double v = f.values[static_cast<size_t>(i)];
        return v * v;
    });
}

/// Vector fields use the pointwise Euclidean magnitude.
inline double norm_lp(const VectorField2& v, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("norm_lp: p must satisfy p >= 1");
    return detail::lp_from_square(v.grid(), v.grid().size(), p, [&](long i) {
        const double a = v.x.values[static_cast<size_t>(i)];
        const double b = v.y.values[static_cast<size_t>(i)];
        return a * a + b * b;
    });
}

inline double norm_linf(const ScalarField& f) {
    return norm_lp(f, std::numeric_limits<double>::infinity());
}
inline double norm_linf(const VectorField2& v) {
    return norm_lp(v, std::numeric_limits<double>::infinity());
}

namespace detail {

inline double hs_sum_sq(const Spectrum& s, double order) {
    const int n = s.n, half = s.half();
    double sum = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        const double ky = wavenumber(iy, n);
        for (int ix = 0; ix < half; ++ix) {
            // Interior half-plane columns stand for a conjugate pair.
            const double dup = (ix == 0 || ix == n / 2) ? 1.0 : 2.0;
            const double k2 = static_cast<double>(ix) * ix + ky * ky;
            sum += dup * std::pow(1.0 + k2, order) * std::norm(s.at(iy, ix));
        }
    }
    return sum;
}

}  // namespace detail

/// Fourier Sobolev norm ( sum_k (1+|k|^2)^s |c_k|^2 )^(1/2), normalized so
/// that s = 0 reproduces the L^2 quadrature norm.
inline double norm_hs(const ScalarField& f, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("norm_hs: order must be >= 0");
    return f.grid.length * std::sqrt(detail::hs_sum_sq(fft_forward(f), s));
}

inline double norm_hs(const VectorField2& v, double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("norm_hs: order must be >= 0");
    return v.grid().length *
           std::sqrt(detail::hs_sum_sq(fft_forward(v.x), s) +
                     detail::hs_sum_sq(fft_forward(v.y), s));
}

namespace detail {

struct DerivTerm {
    int ax;
    int ay;
    double weight;
};

/// Multi-index family for W^{k,q} with binomial/multinomial multiplicities,
/// chosen so that the q = 2 norm coincides with norm_hs(., k) by Parseval.
inline std::vector<DerivTerm> sobolev_terms(int k) {
    switch (k) {
        case 0:
            return {{0, 0, 1}};
        case 1:
            return {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
        case 2:
            return {{0, 0, 1}, {1, 0, 2}, {0, 1, 2}, {2, 0, 1}, {1, 1, 2}, {0, 2, 1}};
        case 3:
            return {{0, 0, 1}, {1, 0, 3}, {0, 1, 3}, {2, 0, 3}, {1, 1, 6},
                    {0, 2, 3}, {3, 0, 1}, {2, 1, 3}, {1, 2, 3}, {0, 3, 1}};
        default:
            throw std::invalid_argument("norm_sobolev: only orders k <= 3 are supported");
    }
}

inline Spectrum derive(const Spectrum& s, int ax, int ay) {
    Spectrum out = s;
    const std::complex<double> I(0.0, 1.0);
    for_each_mode(out, [&](int iy, int ix, std::complex<double>& z) {
        const double kx = deriv_wavenumber(ix, out.n);
        const double ky = deriv_wavenumber(iy, out.n);
        std::complex<double> m(1.0, 0.0);
        for (int a = 0; a < ax; ++a) m *= I * kx;
        for (int a = 0; a < ay; ++a) m *= I * ky;
        z *= m;
    });
    return out;
}

template <class DerivField>
inline double sobolev_impl(const DerivField& derivative, int k, double q) {
    if (k < 0) throw std::invalid_argument("norm_sobolev: order must be >= 0");
    if (!(q >= 1.0)) throw std::invalid_argument("norm_sobolev: q must satisfy q >= 1");
    const auto terms = sobolev_terms(k);
    if (std::isinf(q)) {
        double m = 0.0;
        for (const auto& t : terms) m = std::max(m, norm_linf(derivative(t.ax, t.ay)));
        return m;
    }
    double sum = 0.0;
    for (const auto& t : terms)
        sum += t.weight * std::pow(norm_lp(derivative(t.ax, t.ay), q), q);
    return std::pow(sum, 1.0 / q);
}

}  // namespace detail

/// W^{k,q} norm: q-th-root of the weighted sum over all derivatives up to
/// order k (see sobolev_terms for the weights).
inline double norm_sobolev(const ScalarField& f, int k, double q) {
    const Spectrum s = fft_forward(f);
    auto deriv_field = [&](int ax, int ay) {
        return fft_inverse(detail::derive(s, ax, ay), f.grid);
    };
    return detail::sobolev_impl(deriv_field, k, q);
}

inline double norm_sobolev(const VectorField2& v, int k, double q) {
    const Spectrum sx = fft_forward(v.x);
    const Spectrum sy = fft_forward(v.y);
    auto deriv_field = [&](int ax, int ay) {
        return VectorField2{fft_inverse(detail::derive(sx, ax, ay), v.grid()),
                            fft_inverse(detail::derive(sy, ax, ay), v.grid())};
    };
    return detail::sobolev_impl(deriv_field, k, q);
}

}  // namespace mhd2d
