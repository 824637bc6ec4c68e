#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "field.hpp"

namespace mhd2d {

/// Half-plane spectrum of a real field: rows run over ky indices 0..n-1,
/// columns over kx = 0..n/2 (the remaining modes are the conjugates).
/// Coefficients are normalized so that f(x) = sum_k c_k exp(i k.x).
struct Spectrum {
    int n = 0;
    std::vector<std::complex<double>> c;

    int half() const { return n / 2 + 1; }
    std::complex<double>& at(int iy, int ix) {
        return c[static_cast<size_t>(iy) * half() + ix];
    }
    const std::complex<double>& at(int iy, int ix) const {
        return c[static_cast<size_t>(iy) * half() + ix];
    }
};

namespace detail {

struct FftPlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit FftPlanPair(int n) {
        std::vector<double> rbuf(static_cast<size_t>(n) * n);
        std::vector<std::complex<double>> cbuf(static_cast<size_t>(n) * (n / 2 + 1));
        // FFTW_UNALIGNED keeps the plans valid for arbitrary caller buffers,
        // and FFTW_ESTIMATE keeps planning deterministic.
        r2c = fftw_plan_dft_r2c_2d(n, n, rbuf.data(),
                                   reinterpret_cast<fftw_complex*>(cbuf.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
        c2r = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(cbuf.data()),
                                   rbuf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~FftPlanPair() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
    FftPlanPair(const FftPlanPair&) = delete;
    FftPlanPair& operator=(const FftPlanPair&) = delete;
};

inline const FftPlanPair& plans_for(int n) {
    static std::mutex mu;
    static std::map<int, FftPlanPair> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.try_emplace(n, n).first;
    return it->second;
}

}  // namespace detail

inline Spectrum fft_forward(const ScalarField& f) {
    const int n = f.grid.n;
    const auto& plans = detail::plans_for(n);
    std::vector<double> in(f.values);
    Spectrum s;
    s.n = n;
    s.c.resize(static_cast<size_t>(n) * (n / 2 + 1));
    fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(s.c.data()));
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (auto& z : s.c) z *= scale;
    return s;
}

/// Inverse transform; consumes the spectrum (the c2r pass scrambles its input).
inline ScalarField fft_inverse(Spectrum s, const Grid& g) {
    const auto& plans = detail::plans_for(s.n);
    ScalarField out(g);
    fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(s.c.data()),
                         out.values.data());
    return out;
}

}  // namespace mhd2d
