#pragma once

#include <cmath>
#include <complex>

#include "fft.hpp"

namespace mhd2d {

/// Signed wavenumber of a transform index; the Nyquist index maps to +n/2.
/// Use for even multipliers (|k|^2 weights, diffusion, Sobolev weights).
inline double wavenumber(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }

/// Wavenumber used inside first-order derivative multipliers. The Nyquist
/// mode is dropped: i*k at k = n/2 has no real-valued counterpart on the
/// grid, and zeroing it keeps d/dx, div, curl and the projector consistent
/// with each other.
inline double deriv_wavenumber(int idx, int n) {
    if (idx == n / 2) return 0.0;
    return idx <= n / 2 ? idx : idx - n;
}

namespace detail {

template <class Fn>
inline void for_each_mode(Spectrum& s, Fn&& fn) {
    const int n = s.n, half = s.half();
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < half; ++ix) fn(iy, ix, s.c[static_cast<size_t>(iy) * half + ix]);
}

}  // namespace detail

/// Apply a real multiplier m(kx, ky) given with full (even-capable) wavenumbers.
template <class Fn>
inline Spectrum apply_multiplier(Spectrum s, Fn&& multiplier) {
    detail::for_each_mode(s, [&](int iy, int ix, std::complex<double>& z) {
        z *= multiplier(static_cast<double>(ix), wavenumber(iy, s.n));
    });
    return s;
}

inline VectorField2 gradient(const ScalarField& f) {
    Spectrum s = fft_forward(f);
    Spectrum sx = s, sy = std::move(s);
    const std::complex<double> I(0.0, 1.0);
    detail::for_each_mode(sx, [&](int iy, int ix, std::complex<double>& z) {
        (void)iy;
        z *= I * deriv_wavenumber(ix, sx.n);
    });
    detail::for_each_mode(sy, [&](int iy, int ix, std::complex<double>& z) {
        (void)ix;
        z *= I * deriv_wavenumber(iy, sy.n);
    });
    return {fft_inverse(std::move(sx), f.grid), fft_inverse(std::move(sy), f.grid)};
}

inline ScalarField divergence(const VectorField2& v) {
    Spectrum sx = fft_forward(v.x);
    Spectrum sy = fft_forward(v.y);
    const std::complex<double> I(0.0, 1.0);
    detail::for_each_mode(sx, [&](int iy, int ix, std::complex<double>& z) {
        z = I * (deriv_wavenumber(ix, sx.n) * z +
                 deriv_wavenumber(iy, sx.n) * sy.at(iy, ix));
    });
    return fft_inverse(std::move(sx), v.grid());
}

/// In 2D the curl of a vector field is the scalar dx(v2) - dy(v1).
inline ScalarField scalar_curl(const VectorField2& v) {
    Spectrum sx = fft_forward(v.x);
    Spectrum sy = fft_forward(v.y);
    const std::complex<double> I(0.0, 1.0);
    detail::for_each_mode(sy, [&](int iy, int ix, std::complex<double>& z) {
        z = I * (deriv_wavenumber(ix, sy.n) * z -
                 deriv_wavenumber(iy, sy.n) * sx.at(iy, ix));
    });
    return fft_inverse(std::move(sy), v.grid());
}

inline ScalarField laplacian(const ScalarField& f) {
    Spectrum s = apply_multiplier(fft_forward(f), [](double kx, double ky) {
        return -(kx * kx + ky * ky);
    });
    return fft_inverse(std::move(s), f.grid);
}

inline VectorField2 laplacian(const VectorField2& v) {
    return {laplacian(v.x), laplacian(v.y)};
}

/// Exact heat semigroup exp(t*Laplacian) applied mode by mode.
inline ScalarField heat_semigroup(const ScalarField& f, double t) {
    Spectrum s = apply_multiplier(fft_forward(f), [t](double kx, double ky) {
        return std::exp(-t * (kx * kx + ky * ky));
    });
    return fft_inverse(std::move(s), f.grid);
}

namespace detail {

/// Remove the gradient part of (sx, sy) in place; kd = 0 modes (the mean and
/// the Nyquist lines, which carry no derivative content) are left untouched.
inline void project_divergence_free(Spectrum& sx, Spectrum& sy) {
    const int n = sx.n;
    for_each_mode(sx, [&](int iy, int ix, std::complex<double>& zx) {
        const double kx = deriv_wavenumber(ix, n);
        const double ky = deriv_wavenumber(iy, n);
        const double k2 = kx * kx + ky * ky;
        if (k2 == 0.0) return;
        std::complex<double>& zy = sy.at(iy, ix);
        const std::complex<double> along = (kx * zx + ky * zy) / k2;
        zx -= kx * along;
        zy -= ky * along;
    });
}

}  // namespace detail

/// Orthogonal projection onto divergence-free fields. Mean (zero-frequency)
/// modes are preserved.
inline VectorField2 leray_project(const VectorField2& v) {
    Spectrum sx = fft_forward(v.x);
    Spectrum sy = fft_forward(v.y);
    detail::project_divergence_free(sx, sy);
    return {fft_inverse(std::move(sx), v.grid()), fft_inverse(std::move(sy), v.grid())};
}

/// Potential phi with grad(phi) equal to the curl-free part of v (zero mean).
inline ScalarField helmholtz_potential(const VectorField2& v) {
    Spectrum sx = fft_forward(v.x);
    Spectrum sy = fft_forward(v.y);
    const std::complex<double> I(0.0, 1.0);
    detail::for_each_mode(sx, [&](int iy, int ix, std::complex<double>& z) {
        const double kx = deriv_wavenumber(ix, sx.n);
        const double ky = deriv_wavenumber(iy, sx.n);
        const double k2 = kx * kx + ky * ky;
        z = k2 == 0.0 ? 0.0 : -I * (kx * z + ky * sy.at(iy, ix)) / k2;
    });
    return fft_inverse(std::move(sx), v.grid());
}

/// Two-thirds rule: zero every mode with |kx| > n/3 or |ky| > n/3.
inline void dealias(Spectrum& s) {
    const double cut = s.n / 3.0;
    detail::for_each_mode(s, [&](int iy, int ix, std::complex<double>& z) {
        if (ix > cut || std::abs(wavenumber(iy, s.n)) > cut) z = 0.0;
    });
}

inline ScalarField dealias(const ScalarField& f) {
    Spectrum s = fft_forward(f);
    dealias(s);
    return fft_inverse(std::move(s), f.grid);
}

inline VectorField2 dealias(const VectorField2& v) {
    return {dealias(v.x), dealias(v.y)};
}

inline double max_abs_divergence(const VectorField2& v) { return max_abs(divergence(v)); }

}  // namespace mhd2d
