#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "littlewood_paley.hpp"
#include "parallel.hpp"
#include "solver.hpp"

namespace mhd2d {

// ---------------------------------------------------------------------------
// Energy
// ---------------------------------------------------------------------------

struct EnergyReport {
    std::vector<double> t;
    std::vector<double> e_kin;   // 1/2 int rho |u|^2
    std::vector<double> e_mag;   // 1/2 int |B|^2
    std::vector<double> diss_u;  // int |grad u|^2
    std::vector<double> diss_B;  // int |grad B|^2

    double total(size_t i) const { return e_kin[i] + e_mag[i]; }
};

namespace detail {

inline double grad_sq_l2(const VectorField2& v) {
    const VectorField2 gx = gradient(v.x);
    const VectorField2 gy = gradient(v.y);
    const double h2 = v.grid().spacing() * v.grid().spacing();
    double s = 0.0;
    for (size_t i = 0; i < gx.x.values.size(); ++i)
        s += gx.x.values[i] * gx.x.values[i] + gx.y.values[i] * gx.y.values[i] +
             gy.x.values[i] * gy.x.values[i] + gy.y.values[i] * gy.y.values[i];
    return s * h2;
}

inline double weighted_kinetic(const ScalarField& rho, const VectorField2& u) {
    const double h2 = rho.grid.spacing() * rho.grid.spacing();
    double s = 0.0;
    for (size_t i = 0; i < rho.values.size(); ++i)
        s += rho.values[i] * (u.x.values[i] * u.x.values[i] + u.y.values[i] * u.y.values[i]);
    return 0.5 * s * h2;
}

/// Trapezoid cumulative integral over uniformly spaced samples.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
    return out;
}

}  // namespace detail

inline EnergyReport energy_report(const Trajectory& traj) {
    EnergyReport rep;
    for (const State& s : traj.states) {
        rep.t.push_back(s.t);
        rep.e_kin.push_back(detail::weighted_kinetic(s.rho, s.u));
        rep.e_mag.push_back(0.5 * std::pow(norm_lp(s.B, 2.0), 2));
        rep.diss_u.push_back(detail::grad_sq_l2(s.u));
        rep.diss_B.push_back(detail::grad_sq_l2(s.B));
    }
    return rep;
}

/// One verified identity: lhs(t) vs rhs(t) with |lhs - rhs| and the scale the
/// defect should be judged against.
struct IdentityDefect {
    std::vector<double> t, lhs, rhs, defect, scale;

    void push(double time, double l, double r) {
        t.push_back(time);
        lhs.push_back(l);
        rhs.push_back(r);
        defect.push_back(std::abs(l - r));
        scale.push_back(std::max({std::abs(l), std::abs(r), 1.0}));
    }
    double max_relative() const {
        double m = 0.0;
        for (size_t i = 0; i < t.size(); ++i) m = std::max(m, defect[i] / scale[i]);
        return m;
    }
};

/// E(t) - E(0) against minus the accumulated dissipation.
inline IdentityDefect energy_identity_defect(const Trajectory& traj) {
    if (traj.size() < 3)
        throw std::invalid_argument("energy_identity_defect: need at least 3 snapshots");
    const EnergyReport rep = energy_report(traj);
    std::vector<double> diss(rep.t.size());
    for (size_t i = 0; i < diss.size(); ++i) diss[i] = rep.diss_u[i] + rep.diss_B[i];
    const std::vector<double> acc = detail::cumulative_trapezoid(diss, traj.dt_snapshot);
    IdentityDefect out;
    for (size_t i = 0; i < rep.t.size(); ++i)
        out.push(rep.t[i], rep.total(i) - rep.total(0), -acc[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Density transport bounds
// ---------------------------------------------------------------------------

struct DensityBoundsReport {
    bool pass = true;
    double worst_max_excess = 0.0;   // max over t of rho_max(t) - rho_max(0)
    double worst_min_deficit = 0.0;  // max over t of rho_min(0) - rho_min(t)
    double max_decay_fraction = 0.0; // interpolation smoothing of the maximum
};

/// One-sided transport bounds: the minimum must never decrease, the maximum
/// never increase (zero tolerance). Also reports how much the max decayed.
inline DensityBoundsReport density_max_principle(const Trajectory& traj) {
    DensityBoundsReport rep;
    if (traj.states.empty()) return rep;
    const double min0 = field_min(traj.states.front().rho);
    const double max0 = field_max(traj.states.front().rho);
    for (const State& s : traj.states) {
        const double lo = field_min(s.rho), hi = field_max(s.rho);
        rep.worst_max_excess = std::max(rep.worst_max_excess, hi - max0);
        rep.worst_min_deficit = std::max(rep.worst_min_deficit, min0 - lo);
        if (hi > max0 || lo < min0) rep.pass = false;
        if (max0 > 0.0)
            rep.max_decay_fraction = std::max(rep.max_decay_fraction, (max0 - hi) / max0);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Blow-up functionals
// ---------------------------------------------------------------------------

namespace detail {

/// Per-snapshot norms feeding the functionals; derivative entries only at
/// interior snapshots (centered differences).
struct FunctionalTable {
    std::vector<double> t;
    std::vector<double> h2_sq;        // |rho|_H2^2 + |u|_H2^2 + |B|_H2^2
    std::vector<double> h1_sq;        // |u|_H1^2 + |B|_H1^2
    std::vector<double> h3_sq;        // |u|_H3^2 + |B|_H3^2
    std::vector<double> sqrt_rho_ut_sq;  // interior only, else 0
    std::vector<double> bt_sq;           // interior only, else 0
    std::vector<double> ut_h1_sq;        // |u_t|_H1^2 + |B_t|_H1^2, interior only
    std::vector<double> linf_sq;         // |u|_inf^2 + |B|_inf^2
};

inline FunctionalTable functional_table(const Trajectory& traj) {
    const size_t m = traj.size();
    FunctionalTable tab;
    tab.t.resize(m);
    tab.h2_sq.resize(m);
    tab.h1_sq.resize(m);
    tab.h3_sq.resize(m);
    tab.sqrt_rho_ut_sq.assign(m, 0.0);
    tab.bt_sq.assign(m, 0.0);
    tab.ut_h1_sq.assign(m, 0.0);
    tab.linf_sq.resize(m);
    const double two_h = 2.0 * traj.dt_snapshot;
    // Per-snapshot work is independent; every worker writes its own slots, so
    // the result is identical for any MHD2D_THREADS budget.
    parallel_for(m, [&](size_t i) {
        const State& s = traj.states[i];
        tab.t[i] = s.t;
        const double rho_h2 = norm_hs(s.rho, 2.0);
        const double u_h2 = norm_hs(s.u, 2.0), b_h2 = norm_hs(s.B, 2.0);
        tab.h2_sq[i] = rho_h2 * rho_h2 + u_h2 * u_h2 + b_h2 * b_h2;
        const double u_h1 = norm_hs(s.u, 1.0), b_h1 = norm_hs(s.B, 1.0);
        tab.h1_sq[i] = u_h1 * u_h1 + b_h1 * b_h1;
        const double u_h3 = norm_hs(s.u, 3.0), b_h3 = norm_hs(s.B, 3.0);
        tab.h3_sq[i] = u_h3 * u_h3 + b_h3 * b_h3;
        const double u_inf = norm_linf(s.u), b_inf = norm_linf(s.B);
        tab.linf_sq[i] = u_inf * u_inf + b_inf * b_inf;
        if (i == 0 || i + 1 == m) return;
        const State& prev = traj.states[i - 1];
        const State& next = traj.states[i + 1];
        VectorField2 ut(s.grid()), bt(s.grid());
        double srut = 0.0, btsq = 0.0;
        for (size_t k = 0; k < ut.x.values.size(); ++k) {
            ut.x.values[k] = (next.u.x.values[k] - prev.u.x.values[k]) / two_h;
            ut.y.values[k] = (next.u.y.values[k] - prev.u.y.values[k]) / two_h;
            bt.x.values[k] = (next.B.x.values[k] - prev.B.x.values[k]) / two_h;
            bt.y.values[k] = (next.B.y.values[k] - prev.B.y.values[k]) / two_h;
            srut += std::max(s.rho.values[k], 0.0) *
                    (ut.x.values[k] * ut.x.values[k] + ut.y.values[k] * ut.y.values[k]);
            btsq += bt.x.values[k] * bt.x.values[k] + bt.y.values[k] * bt.y.values[k];
        }
        const double h2cell = s.grid().spacing() * s.grid().spacing();
        tab.sqrt_rho_ut_sq[i] = srut * h2cell;
        tab.bt_sq[i] = btsq * h2cell;
        const double ut_h1 = norm_hs(ut, 1.0), bt_h1 = norm_hs(bt, 1.0);
        tab.ut_h1_sq[i] = ut_h1 * ut_h1 + bt_h1 * bt_h1;
    });
    return tab;
}

inline size_t snapshot_index(const Trajectory& traj, double t, const char* who) {
    if (traj.states.empty()) throw std::invalid_argument(std::string(who) + ": empty trajectory");
    const double t0 = traj.t_begin();
    if (t < t0 - 1e-12 || t > traj.t_end() + 1e-12)
        throw std::invalid_argument(std::string(who) + ": time outside the trajectory span");
    if (traj.size() == 1) return 0;
    const long i = std::lround((t - t0) / traj.dt_snapshot);
    return static_cast<size_t>(std::min<long>(std::max<long>(i, 0), traj.size() - 1));
}

}  // namespace detail

/// Phi(T): sup of squared H2 norms, the sup of the weighted velocity time
/// derivative, and the accumulated H3 and time-derivative H1 content up to T.
/// Time derivatives are centered differences of snapshots; the endpoints are
/// excluded from their sup/integral contributions.
inline double phi(const Trajectory& traj, double T) {
    const size_t iT = detail::snapshot_index(traj, T, "phi");
    const detail::FunctionalTable tab = detail::functional_table(traj);
    double sup_h2 = 0.0, sup_srut = 0.0;
    for (size_t i = 0; i <= iT; ++i) {
        sup_h2 = std::max(sup_h2, tab.h2_sq[i]);
        sup_srut = std::max(sup_srut, tab.sqrt_rho_ut_sq[i]);
    }
    const std::vector<double> ih3 = detail::cumulative_trapezoid(tab.h3_sq, traj.dt_snapshot);
    const std::vector<double> iut = detail::cumulative_trapezoid(tab.ut_h1_sq, traj.dt_snapshot);
    return sup_h2 + sup_srut + ih3[iT] + iut[iT];
}

/// Phi evaluated at every snapshot time in one pass.
inline std::vector<double> phi_series(const Trajectory& traj) {
    const detail::FunctionalTable tab = detail::functional_table(traj);
    const std::vector<double> ih3 = detail::cumulative_trapezoid(tab.h3_sq, traj.dt_snapshot);
    const std::vector<double> iut = detail::cumulative_trapezoid(tab.ut_h1_sq, traj.dt_snapshot);
    std::vector<double> out(tab.t.size());
    double sup_h2 = 0.0, sup_srut = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
        sup_h2 = std::max(sup_h2, tab.h2_sq[i]);
        sup_srut = std::max(sup_srut, tab.sqrt_rho_ut_sq[i]);
        out[i] = sup_h2 + sup_srut + ih3[i] + iut[i];
    }
    return out;
}

/// Psi(t) = e + sup of squared H1 norms + accumulated time-derivative L2 mass.
inline double psi(const Trajectory& traj, double t) {
    const size_t it = detail::snapshot_index(traj, t, "psi");
    const detail::FunctionalTable tab = detail::functional_table(traj);
    double sup_h1 = 0.0;
    for (size_t i = 0; i <= it; ++i) sup_h1 = std::max(sup_h1, tab.h1_sq[i]);
    std::vector<double> integrand(tab.t.size());
    for (size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = tab.sqrt_rho_ut_sq[i] + tab.bt_sq[i];
    const std::vector<double> acc = detail::cumulative_trapezoid(integrand, traj.dt_snapshot);
    return std::numbers::e_v<double> + sup_h1 + acc[it];
}

/// Psi evaluated at every snapshot time in one pass.
inline std::vector<double> psi_series(const Trajectory& traj) {
    const detail::FunctionalTable tab = detail::functional_table(traj);
    std::vector<double> integrand(tab.t.size());
    for (size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = tab.sqrt_rho_ut_sq[i] + tab.bt_sq[i];
    const std::vector<double> acc = detail::cumulative_trapezoid(integrand, traj.dt_snapshot);
    std::vector<double> out(tab.t.size());
    double sup_h1 = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
        sup_h1 = std::max(sup_h1, tab.h1_sq[i]);
        out[i] = std::numbers::e_v<double> + sup_h1 + acc[i];
    }
    return out;
}

/// int_0^T |u|_{L^r}^s dt with the 2D scaling relation 2/s + 2/r = 1
/// (r = inf, s = 2 admitted). Finiteness is the blow-up test.
inline double serrin_integral(const Trajectory& traj, double r, double s) {
    const double two_over_r = std::isinf(r) ? 0.0 : 2.0 / r;
    if (!(r > 2.0) || !(s >= 2.0) || std::abs(2.0 / s + two_over_r - 1.0) > 1e-12)
        throw std::invalid_argument("serrin_integral: exponents must satisfy 2/s + 2/r = 1");
    std::vector<double> integrand;
    integrand.reserve(traj.size());
    for (const State& st : traj.states) integrand.push_back(std::pow(norm_lp(st.u, r), s));
    const std::vector<double> acc = detail::cumulative_trapezoid(integrand, traj.dt_snapshot);
    return acc.empty() ? 0.0 : acc.back();
}

/// The two tested gradient-energy identities, evaluated at interior snapshots:
///   momentum:  1/2 d/dt |grad u|^2 + |sqrt(rho) u_t|^2
///              = -int (rho u . grad u) . u_t + int (B . grad) B . u_t
///   induction: 1/2 d/dt |grad B|^2 + |B_t|^2
///              = -int (u . grad B) . B_t + int (B . grad) u . B_t
struct FirstLevelDefects {
    IdentityDefect momentum;
    IdentityDefect induction;
};

inline FirstLevelDefects first_level_identity_defect(const Trajectory& traj) {
    if (traj.size() < 3)
        throw std::invalid_argument("first_level_identity_defect: need at least 3 snapshots");
    const size_t m = traj.size();
    const double h = traj.dt_snapshot;
    std::vector<double> grad_u_sq(m), grad_b_sq(m);
    for (size_t i = 0; i < m; ++i) {
        grad_u_sq[i] = detail::grad_sq_l2(traj.states[i].u);
        grad_b_sq[i] = detail::grad_sq_l2(traj.states[i].B);
    }
    FirstLevelDefects out;
    const double h2cell =
        traj.states[0].grid().spacing() * traj.states[0].grid().spacing();
    for (size_t i = 1; i + 1 < m; ++i) {
        const State& s = traj.states[i];
        const State& prev = traj.states[i - 1];
        const State& next = traj.states[i + 1];
        VectorField2 ut(s.grid()), bt(s.grid());
        for (size_t k = 0; k < ut.x.values.size(); ++k) {
            ut.x.values[k] = (next.u.x.values[k] - prev.u.x.values[k]) / (2.0 * h);
            ut.y.values[k] = (next.u.y.values[k] - prev.u.y.values[k]) / (2.0 * h);
            bt.x.values[k] = (next.B.x.values[k] - prev.B.x.values[k]) / (2.0 * h);
            bt.y.values[k] = (next.B.y.values[k] - prev.B.y.values[k]) / (2.0 * h);
        }
        const VectorField2 u_adv = detail::advective_term(s.u, s.u);
        const VectorField2 b_on_b = detail::advective_term(s.B, s.B);
        const VectorField2 u_on_b = detail::advective_term(s.u, s.B);
        const VectorField2 b_on_u = detail::advective_term(s.B, s.u);
        double srut = 0.0, btsq = 0.0, mom_rhs = 0.0, ind_rhs = 0.0;
        for (size_t k = 0; k < ut.x.values.size(); ++k) {
            const double r = s.rho.values[k];
            srut += std::max(r, 0.0) *
                    (ut.x.values[k] * ut.x.values[k] + ut.y.values[k] * ut.y.values[k]);
            btsq += bt.x.values[k] * bt.x.values[k] + bt.y.values[k] * bt.y.values[k];
            mom_rhs += (-r * u_adv.x.values[k] + b_on_b.x.values[k]) * ut.x.values[k] +
                       (-r * u_adv.y.values[k] + b_on_b.y.values[k]) * ut.y.values[k];
            ind_rhs += (-u_on_b.x.values[k] + b_on_u.x.values[k]) * bt.x.values[k] +
                       (-u_on_b.y.values[k] + b_on_u.y.values[k]) * bt.y.values[k];
        }
        const double d_grad_u = (grad_u_sq[i + 1] - grad_u_sq[i - 1]) / (2.0 * h);
        const double d_grad_b = (grad_b_sq[i + 1] - grad_b_sq[i - 1]) / (2.0 * h);
        out.momentum.push(s.t, 0.5 * d_grad_u + srut * h2cell, mom_rhs * h2cell);
        out.induction.push(s.t, 0.5 * d_grad_b + btsq * h2cell, ind_rhs * h2cell);
    }
    return out;
}

/// Psi(T) against Psi(s) * exp(C int_s^T (|u|_inf^2 + |B|_inf^2)); C is fitted
/// as the smallest constant that dominates Psi over the whole run.
struct GronwallReport {
    std::vector<double> t;
    std::vector<double> psi_series;
    std::vector<double> envelope;
    double c_fit = 0.0;
};

inline GronwallReport gronwall_envelope(const Trajectory& traj, double s) {
    const size_t is = detail::snapshot_index(traj, s, "gronwall_envelope");
    const detail::FunctionalTable tab = detail::functional_table(traj);

    std::vector<double> psi_all(tab.t.size());
    {
        double sup_h1 = 0.0, acc = 0.0;
        for (size_t i = 0; i < tab.t.size(); ++i) {
            sup_h1 = std::max(sup_h1, tab.h1_sq[i]);
            if (i > 0)
                acc += 0.5 * traj.dt_snapshot *
                       ((tab.sqrt_rho_ut_sq[i - 1] + tab.bt_sq[i - 1]) +
                        (tab.sqrt_rho_ut_sq[i] + tab.bt_sq[i]));
            psi_all[i] = std::numbers::e_v<double> + sup_h1 + acc;
        }
    }
    const std::vector<double> linf_acc =
        detail::cumulative_trapezoid(tab.linf_sq, traj.dt_snapshot);

    GronwallReport rep;
    const double psi_s = psi_all[is];
    for (size_t i = is; i < tab.t.size(); ++i) {
        const double window = linf_acc[i] - linf_acc[is];
        if (window > 1e-14)
            rep.c_fit = std::max(rep.c_fit, std::log(psi_all[i] / psi_s) / window);
    }
    for (size_t i = is; i < tab.t.size(); ++i) {
        rep.t.push_back(tab.t[i]);
        rep.psi_series.push_back(psi_all[i]);
        rep.envelope.push_back(psi_s * std::exp(rep.c_fit * (linf_acc[i] - linf_acc[is])));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Stationary regularity probes
// ---------------------------------------------------------------------------

/// Solve -Lap(u) + grad(P) = F, div u = 0 spectrally (zero-mean convention)
/// and return |u|_{W^{2,q}} / ( |F|_{L^q} + |u|_{H^1} ).
inline double stokes_regularity_probe(const VectorField2& F, double q) {
    if (!(q > 1.0) || std::isinf(q))
        throw std::invalid_argument("stokes_regularity_probe: require 1 < q < inf");
    if (max_abs(F) == 0.0)
        throw std::invalid_argument("stokes_regularity_probe: zero forcing");
    Spectrum sx = fft_forward(F.x);
    Spectrum sy = fft_forward(F.y);
    detail::project_divergence_free(sx, sy);
    const auto inv_lap = [](double kx, double ky) {
        const double k2 = kx * kx + ky * ky;
        return k2 == 0.0 ? 0.0 : 1.0 / k2;
    };
    sx = apply_multiplier(std::move(sx), inv_lap);
    sy = apply_multiplier(std::move(sy), inv_lap);
    const VectorField2 u{fft_inverse(std::move(sx), F.grid()),
                         fft_inverse(std::move(sy), F.grid())};
    return norm_sobolev(u, 2, q) / (norm_lp(F, q) + norm_hs(u, 1.0));
}

/// Solve Lap(B) = G spectrally (G must have zero mean) and return
/// |B|_{W^{2,q}} / ( |G|_{L^q} + |B|_{H^1} ).
inline double poisson_regularity_probe(const VectorField2& G, double q) {
    if (!(q > 1.0) || std::isinf(q))
        throw std::invalid_argument("poisson_regularity_probe: require 1 < q < inf");
    if (max_abs(G) == 0.0)
        throw std::invalid_argument("poisson_regularity_probe: zero source");
    const double scale = std::max(max_abs(G), 1.0);
    if (std::abs(mean(G.x)) > 1e-12 * scale || std::abs(mean(G.y)) > 1e-12 * scale)
        throw std::invalid_argument(
            "poisson_regularity_probe: source must have zero mean on the torus");
    const auto inv_lap = [](double kx, double ky) {
        const double k2 = kx * kx + ky * ky;
        return k2 == 0.0 ? 0.0 : -1.0 / k2;
    };
    const VectorField2 B{
        fft_inverse(apply_multiplier(fft_forward(G.x), inv_lap), G.grid()),
        fft_inverse(apply_multiplier(fft_forward(G.y), inv_lap), G.grid())};
    return norm_sobolev(B, 2, q) / (norm_lp(G, q) + norm_hs(B, 1.0));
}

}  // namespace mhd2d
