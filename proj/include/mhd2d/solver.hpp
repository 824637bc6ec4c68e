#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "multigrid.hpp"
#include "series.hpp"
#include "state.hpp"

namespace mhd2d {

struct SolverConfig {
    double dt = 5e-4;
    double eps_rel = 1e-6;    // vacuum floor, relative to the initial max density
    double cfl = 0.5;         // advisory CFL number for the advection warning
    bool dealias = true;      // two-thirds rule on all transported products
    double picard_tol = 1e-10;  // relative residual target of the elliptic solves
    int picard_max = 500;

    void validate() const {
        if (!(dt > 0.0) || !(cfl > 0.0) || !(picard_tol > 0.0) || picard_max < 1 ||
            !(eps_rel > 0.0 && eps_rel < 1.0))
            throw std::invalid_argument("SolverConfig: parameters out of range");
    }
};

// ---------------------------------------------------------------------------
// Density transport
// ---------------------------------------------------------------------------

struct AdvectResult {
    ScalarField rho;
    bool cfl_warning = false;
};

namespace detail {

/// Periodic bilinear sample at fractional index coordinates.
inline double bilinear(const ScalarField& f, double xi, double yi) {
    const int n = f.grid.n;
    const long fx = static_cast<long>(std::floor(xi));
    const long fy = static_cast<long>(std::floor(yi));
    const double wx = xi - fx;
    const double wy = yi - fy;
    const int x0 = static_cast<int>(((fx % n) + n) % n);
    const int y0 = static_cast<int>(((fy % n) + n) % n);
    const int x1 = (x0 + 1) % n;
    const int y1 = (y0 + 1) % n;
    const double a = (1.0 - wx) * f.at(y0, x0) + wx * f.at(y0, x1);
    const double b = (1.0 - wx) * f.at(y1, x0) + wx * f.at(y1, x1);
    return (1.0 - wy) * a + wy * b;
}

/// Bilinear sample clamped to the range of its four stencil values, so the
/// interpolation is monotone bit for bit.
inline double bilinear_clamped(const ScalarField& f, double xi, double yi) {
    const int n = f.grid.n;
    const long fx = static_cast<long>(std::floor(xi));
    const long fy = static_cast<long>(std::floor(yi));
    const double wx = xi - fx;
    const double wy = yi - fy;
    const int x0 = static_cast<int>(((fx % n) + n) % n);
    const int y0 = static_cast<int>(((fy % n) + n) % n);
    const int x1 = (x0 + 1) % n;
    const int y1 = (y0 + 1) % n;
    const double v00 = f.at(y0, x0), v01 = f.at(y0, x1);
    const double v10 = f.at(y1, x0), v11 = f.at(y1, x1);
    const double a = (1.0 - wx) * v00 + wx * v01;
    const double b = (1.0 - wx) * v10 + wx * v11;
    double v = (1.0 - wy) * a + wy * b;
    const double lo = std::min(std::min(v00, v01), std::min(v10, v11));
    const double hi = std::max(std::max(v00, v01), std::max(v10, v11));
    return std::min(std::max(v, lo), hi);
}

}  // namespace detail

/// Semi-Lagrangian transport: trace characteristics backward with a midpoint
/// step, sample with clamped bilinear interpolation. The clamping gives the
/// discrete one-sided maximum principle exactly: min rho never decreases is
/// mirrored as "output range inside input range" on every step.
inline AdvectResult advect_density(const ScalarField& rho, const VectorField2& u, double dt,
                                   double cfl = 0.5) {
    if (!(dt > 0.0)) throw std::invalid_argument("advect_density: dt must be positive");
    const Grid& g = rho.grid;
    const double h = g.spacing();
    const double umax = max_abs(u);
    AdvectResult out{ScalarField(g), false};
    if (umax > 0.0 && dt > 4.0 * cfl * h / umax) out.cfl_warning = true;

    const double scale = dt / h;  // displacement in index units
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            const double ux0 = u.x.at(iy, ix);
            const double uy0 = u.y.at(iy, ix);
            const double xm = ix - 0.5 * scale * ux0;
            const double ym = iy - 0.5 * scale * uy0;
            const double uxm = detail::bilinear(u.x, xm, ym);
            const double uym = detail::bilinear(u.y, xm, ym);
            out.rho.at(iy, ix) =
                detail::bilinear_clamped(rho, ix - scale * uxm, iy - scale * uym);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Preconditioned conjugate gradients over scalar fields
// ---------------------------------------------------------------------------

namespace detail {

inline double dot(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

inline void axpy(double alpha, const ScalarField& x, ScalarField& y) {
    for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

inline void remove_mean(ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m += v;
    m /= static_cast<double>(f.values.size());
    for (double& v : f.values) v -= m;
}

/// Null space of the spectral operator -div(beta grad .): the constant plus
/// the three Nyquist checkerboards (the derivative multipliers vanish on the
/// Nyquist lines). Projecting them out keeps the Krylov iteration on the
/// definite complement.
inline void remove_null_modes(ScalarField& f) {
    const int n = f.grid.n;
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        const double sy = (iy & 1) ? -1.0 : 1.0;
        for (int ix = 0; ix < n; ++ix) {
            const double sx = (ix & 1) ? -1.0 : 1.0;
            const double v = f.at(iy, ix);
            a0 += v;
            a1 += sx * v;
            a2 += sy * v;
            a3 += sx * sy * v;
        }
    }
    const double inv = 1.0 / static_cast<double>(f.grid.size());
    a0 *= inv;
    a1 *= inv;
    a2 *= inv;
    a3 *= inv;
    for (int iy = 0; iy < n; ++iy) {
        const double sy = (iy & 1) ? -1.0 : 1.0;
        for (int ix = 0; ix < n; ++ix) {
            const double sx = (ix & 1) ? -1.0 : 1.0;
            f.at(iy, ix) -= a0 + a1 * sx + a2 * sy + a3 * sx * sy;
        }
    }
}

struct PcgOutcome {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// stop(residual_field, rel_residual) may impose extra conditions beyond the
/// relative L2 target (the projection uses it to pin max |div u| directly).
/// sanitize(field) projects onto the subspace the operator is definite on.
template <class ApplyA, class ApplyPrec, class Stop, class Sanitize>
inline PcgOutcome pcg(ScalarField& x, const ScalarField& b, ApplyA&& A, ApplyPrec&& M,
                      double tol, int max_iter, Stop&& stop, Sanitize&& sanitize) {
    const double bnorm = std::sqrt(dot(b, b));
    PcgOutcome out;
    if (bnorm == 0.0) {
        x *= 0.0;
        out.converged = true;
        return out;
    }
    sanitize(x);
    ScalarField r = b;
    ScalarField ax = A(x);
    r -= ax;
    sanitize(r);
    out.rel_residual = std::sqrt(dot(r, r)) / bnorm;
    if (out.rel_residual <= tol && stop(r, out.rel_residual)) {
        out.converged = true;
        return out;
    }
    ScalarField z = M(r);
    sanitize(z);
    ScalarField p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        ScalarField ap = A(p);
        sanitize(ap);
        const double alpha = rz / dot(p, ap);
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        sanitize(r);
        out.iterations = it;
        out.rel_residual = std::sqrt(dot(r, r)) / bnorm;
        if (out.rel_residual <= tol && stop(r, out.rel_residual)) {
            out.converged = true;
            sanitize(x);
            return out;
        }
        z = M(r);
        sanitize(z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        p *= beta;
        p += z;
    }
    sanitize(x);
    return out;
}

/// Inverse of (c - dt*Laplacian) as a spectral multiplier.
inline ScalarField helmholtz_inverse(const ScalarField& f, double c, double dt) {
    Spectrum s = apply_multiplier(fft_forward(f), [c, dt](double kx, double ky) {
        return 1.0 / (c + dt * (kx * kx + ky * ky));
    });
    return fft_inverse(std::move(s), f.grid);
}

/// Inverse Laplacian on zero-mean fields.
inline ScalarField poisson_inverse(const ScalarField& f) {
    Spectrum s = apply_multiplier(fft_forward(f), [](double kx, double ky) {
        const double k2 = kx * kx + ky * ky;
        return k2 == 0.0 ? 0.0 : 1.0 / k2;
    });
    return fft_inverse(std::move(s), f.grid);
}

/// (a . grad) w evaluated pointwise from spectral gradients.
inline VectorField2 advective_term(const VectorField2& a, const VectorField2& w) {
    const VectorField2 gx = gradient(w.x);
    const VectorField2 gy = gradient(w.y);
    VectorField2 out(w.grid());
    for (size_t i = 0; i < out.x.values.size(); ++i) {
        out.x.values[i] = a.x.values[i] * gx.x.values[i] + a.y.values[i] * gx.y.values[i];
        out.y.values[i] = a.x.values[i] * gy.x.values[i] + a.y.values[i] * gy.y.values[i];
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Momentum
// ---------------------------------------------------------------------------

/// Provisional velocity before the incompressibility projection.
///
/// The update solves (rho - dt*Laplacian) du = dt*(Laplacian u - N) with
/// N = (rho u . grad) u - (B . grad) B evaluated explicitly and dealiased.
/// Density multiplies only the increment, so the solve stays well posed at
/// rho = 0, and the constant-coefficient spectral inverse preconditions the
/// Krylov iteration (one iteration when rho is constant).
inline VectorField2 momentum_step(const State& state, const SolverConfig& cfg) {
    cfg.validate();
    const Grid& g = state.grid();
    const double dt = cfg.dt;

    VectorField2 transport = detail::advective_term(state.u, state.u);
    const VectorField2 lorentz = detail::advective_term(state.B, state.B);
    for (size_t i = 0; i < transport.x.values.size(); ++i) {
        const double r = state.rho.values[i];
        transport.x.values[i] = r * transport.x.values[i] - lorentz.x.values[i];
        transport.y.values[i] = r * transport.y.values[i] - lorentz.y.values[i];
    }
    if (cfg.dealias) transport = dealias(transport);

    const VectorField2 lap_u = laplacian(state.u);
    const double c = std::max(0.5 * (field_min(state.rho) + field_max(state.rho)), 1e-12);
    auto apply = [&](const ScalarField& x) {
        ScalarField ax = laplacian(x);
        for (size_t i = 0; i < ax.values.size(); ++i)
            ax.values[i] = state.rho.values[i] * x.values[i] - dt * ax.values[i];
        return ax;
    };
    auto precond = [&](const ScalarField& r) { return detail::helmholtz_inverse(r, c, dt); };
    auto accept = [](const ScalarField&, double) { return true; };

    VectorField2 result = state.u;
    for (ScalarField* comp : {&result.x, &result.y}) {
        const ScalarField& lap = comp == &result.x ? lap_u.x : lap_u.y;
        const ScalarField& adv = comp == &result.x ? transport.x : transport.y;
        ScalarField rhs(g);
        for (size_t i = 0; i < rhs.values.size(); ++i)
            rhs.values[i] = dt * (lap.values[i] - adv.values[i]);
        ScalarField du(g);
        const auto outcome = detail::pcg(du, rhs, apply, precond, cfg.picard_tol,
                                         cfg.picard_max, accept, [](ScalarField&) {});
        if (!outcome.converged)
            throw SolverError("momentum solve did not reach its residual target",
                              outcome.rel_residual);
        *comp += du;
    }
    if (!all_finite(result))
        throw SolverError("momentum step produced non-finite velocity at t = " +
                          std::to_string(state.t));
    return result;
}

// ---------------------------------------------------------------------------
// Pressure projection
// ---------------------------------------------------------------------------

struct PressureResult {
    VectorField2 u;
    ScalarField P;
    int iterations = 0;
    double rel_residual = 0.0;
    long floored_points = 0;  // grid points where the vacuum floor was active
};

/// Variable-coefficient projection: solve div( grad(P) / rho_eps ) = div(u*)/dt
/// and correct u = u* - dt grad(P)/rho_eps. rho_eps floors the density at
/// eps_rel times the reference maximum (the run's initial max), confining the
/// vacuum regularization to the elliptic operator.
///
/// With near-constant coefficients the system is solved in spectral form,
/// where the inverse Laplacian preconditions it (exactly, when rho is
/// constant). A vacuum floor makes 1/rho_eps jump orders of magnitude between
/// neighboring cells; the spectral coefficient operator degrades badly there,
/// so the high-contrast path discretizes the elliptic problem with harmonic
/// face coefficients, preconditions with a multigrid V-cycle, and closes with
/// one exact Leray projection that removes the O(h^2) inter-discretization
/// residue and pins the solenoidal invariant.
inline PressureResult pressure_project(const VectorField2& u_star, const ScalarField& rho,
                                       const SolverConfig& cfg, double rho_ref_max = -1.0,
                                       const ScalarField* initial_guess = nullptr) {
    cfg.validate();
    const Grid& g = u_star.grid();
    const double ref = rho_ref_max > 0.0 ? rho_ref_max : field_max(rho);
    const double floor_val = std::max(cfg.eps_rel * ref, 1e-300);

    ScalarField beta(g);
    long floored = 0;
    double beta_min = std::numeric_limits<double>::infinity(), beta_max = 0.0;
    for (size_t i = 0; i < beta.values.size(); ++i) {
        const double r = rho.values[i];
        if (r < floor_val) ++floored;
        const double b = 1.0 / std::max(r, floor_val);
        beta.values[i] = b;
        beta_min = std::min(beta_min, b);
        beta_max = std::max(beta_max, b);
    }

    const double dt = cfg.dt;
    const bool high_contrast = beta_max > 100.0 * beta_min;
    PressureResult out{u_star, ScalarField(g)};
    if (initial_guess && initial_guess->grid == g) out.P = *initial_guess;
    detail::PcgOutcome outcome;

    if (!high_contrast) {
        ScalarField rhs = divergence(u_star);
        rhs *= -1.0 / dt;
        detail::remove_null_modes(rhs);
        auto apply = [&](const ScalarField& p) {
            VectorField2 gp = gradient(p);
            for (size_t i = 0; i < gp.x.values.size(); ++i) {
                gp.x.values[i] *= beta.values[i];
                gp.y.values[i] *= beta.values[i];
            }
            ScalarField ap = divergence(gp);
            ap *= -1.0;
            return ap;
        };
        auto precond = [&](const ScalarField& r) { return detail::poisson_inverse(r); };
        // div u after the correction equals -dt * residual pointwise, so the
        // stopping rule pins the State invariant directly.
        auto accept = [&](const ScalarField& r, double) { return dt * max_abs(r) <= 1e-10; };
        outcome =
            detail::pcg(out.P, rhs, apply, precond, cfg.picard_tol, cfg.picard_max, accept,
                        [](ScalarField& f) { detail::remove_null_modes(f); });
        if (outcome.converged) {
            VectorField2 gp = gradient(out.P);
            for (size_t i = 0; i < out.u.x.values.size(); ++i) {
                out.u.x.values[i] -= dt * beta.values[i] * gp.x.values[i];
                out.u.y.values[i] -= dt * beta.values[i] * gp.y.values[i];
            }
        }
    } else {
        // Staggered (face-flux) form. The corrective flux beta_face * dP/h is
        // exactly what the solve controls, so no coefficient amplification can
        // occur; the concluding Leray projection removes the O(h^2) residue of
        // the face averaging and enforces the solenoidal invariant spectrally.
        const int n = g.n;
        const double h = g.spacing();
        auto id = [n](int iy, int ix) {
            return static_cast<size_t>(iy & (n - 1)) * n + (ix & (n - 1));
        };
        // rhs = -div_MAC(face-averaged u*) / dt
        ScalarField rhs(g);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const double fxp = 0.5 * (u_star.x.values[id(iy, ix)] +
                                          u_star.x.values[id(iy, ix + 1)]);
                const double fxm = 0.5 * (u_star.x.values[id(iy, ix - 1)] +
                                          u_star.x.values[id(iy, ix)]);
                const double fyp = 0.5 * (u_star.y.values[id(iy, ix)] +
                                          u_star.y.values[id(iy + 1, ix)]);
                const double fym = 0.5 * (u_star.y.values[id(iy - 1, ix)] +
                                          u_star.y.values[id(iy, ix)]);
                rhs.values[id(iy, ix)] = -((fxp - fxm) + (fyp - fym)) / (h * dt);
            }
        detail::remove_mean(rhs);

        const MgPoisson mg(beta);
        auto apply = [&](const ScalarField& p) { return mg.operator_apply(p); };
        auto precond = [&](const ScalarField& r) { return mg.apply(r); };
        auto accept = [](const ScalarField&, double) { return true; };
        outcome =
            detail::pcg(out.P, rhs, apply, precond, cfg.picard_tol, cfg.picard_max, accept,
                        [](ScalarField& f) { detail::remove_mean(f); });
        if (outcome.converged) {
            auto harm = [](double a, double b) { return 2.0 * a * b / (a + b); };
            const ScalarField& P = out.P;
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix) {
                    const double bc = beta.values[id(iy, ix)];
                    const double flux_xp = harm(bc, beta.values[id(iy, ix + 1)]) *
                                           (P.values[id(iy, ix + 1)] - P.values[id(iy, ix)]);
                    const double flux_xm = harm(beta.values[id(iy, ix - 1)], bc) *
                                           (P.values[id(iy, ix)] - P.values[id(iy, ix - 1)]);
                    const double flux_yp = harm(bc, beta.values[id(iy + 1, ix)]) *
                                           (P.values[id(iy + 1, ix)] - P.values[id(iy, ix)]);
                    const double flux_ym = harm(beta.values[id(iy - 1, ix)], bc) *
                                           (P.values[id(iy, ix)] - P.values[id(iy - 1, ix)]);
                    out.u.x.values[id(iy, ix)] -= dt * 0.5 * (flux_xp + flux_xm) / h;
                    out.u.y.values[id(iy, ix)] -= dt * 0.5 * (flux_yp + flux_ym) / h;
                }
            out.u = leray_project(out.u);
        }
    }
    if (!outcome.converged)
        throw SolverError("pressure solve stalled at relative residual " +
                              format_g17(outcome.rel_residual),
                          outcome.rel_residual);
    out.iterations = outcome.iterations;
    out.rel_residual = outcome.rel_residual;
    out.floored_points = floored;
    if (!all_finite(out.u))
        throw SolverError("projection produced non-finite velocity");
    return out;
}

// ---------------------------------------------------------------------------
// Induction
// ---------------------------------------------------------------------------

/// Explicit dealiased transport, exact spectral diffusion (the heat factor is
/// applied mode by mode), then a projection to re-enforce div B = 0.
inline VectorField2 induction_step(const State& state, const SolverConfig& cfg) {
    cfg.validate();
    const double dt = cfg.dt;
    VectorField2 transport = detail::advective_term(state.u, state.B);
    transport -= detail::advective_term(state.B, state.u);
    if (cfg.dealias) transport = dealias(transport);

    VectorField2 w = state.B;
    detail::axpy(-dt, transport.x, w.x);
    detail::axpy(-dt, transport.y, w.y);

    Spectrum sx = fft_forward(w.x);
    Spectrum sy = fft_forward(w.y);
    const auto decay = [dt](double kx, double ky) {
        return std::exp(-dt * (kx * kx + ky * ky));
    };
    sx = apply_multiplier(std::move(sx), decay);
    sy = apply_multiplier(std::move(sy), decay);
    detail::project_divergence_free(sx, sy);
    VectorField2 result{fft_inverse(std::move(sx), state.grid()),
                        fft_inverse(std::move(sy), state.grid())};
    if (!all_finite(result))
        throw SolverError("induction step produced non-finite field at t = " +
                          std::to_string(state.t));
    return result;
}

// ---------------------------------------------------------------------------
// Composed step and run loop
// ---------------------------------------------------------------------------

struct StepDiagnostics {
    bool cfl_warning = false;
    long floored_points = 0;
    int pressure_iterations = 0;
};

/// Reusable scratch carried across steps of one run (warm starts only; the
/// results are identical in exact arithmetic and deterministic either way).
struct StepScratch {
    std::optional<ScalarField> pressure;
};

inline State step_ex(const State& state, const SolverConfig& cfg, StepDiagnostics* diag,
                     double rho_ref_max = -1.0, StepScratch* scratch = nullptr) {
    cfg.validate();
    AdvectResult adv = advect_density(state.rho, state.u, cfg.dt, cfg.cfl);
    State mid{state.t, std::move(adv.rho), state.u, state.B};
    VectorField2 u_star = momentum_step(mid, cfg);
    const ScalarField* guess =
        scratch && scratch->pressure ? &*scratch->pressure : nullptr;
    PressureResult pr = pressure_project(u_star, mid.rho, cfg, rho_ref_max, guess);
    if (scratch) scratch->pressure = pr.P;
    mid.u = std::move(pr.u);
    VectorField2 B_new = induction_step(mid, cfg);
    if (diag) {
        diag->cfl_warning = adv.cfl_warning;
        diag->floored_points = pr.floored_points;
        diag->pressure_iterations = pr.iterations;
    }
    return State{state.t + cfg.dt, std::move(mid.rho), std::move(mid.u), std::move(B_new)};
}

inline State step(const State& state, const SolverConfig& cfg) {
    return step_ex(state, cfg, nullptr);
}

struct RunResult {
    Trajectory trajectory;
    EstimateSeries series;
    bool failed = false;
    std::string failure_message;
    long cfl_warning_steps = 0;
    long floor_activations = 0;  // sum over steps of floored grid points
};

namespace detail {

inline std::array<double, 21> series_row(const State& prev, const State& curr,
                                         const State* next, double dt) {
    const Grid& g = curr.grid();
    std::array<double, 21> row{};
    const double h2 = g.spacing() * g.spacing();

    double e_kin = 0.0, mass = 0.0;
    for (size_t i = 0; i < curr.rho.values.size(); ++i) {
        const double r = curr.rho.values[i];
        const double ux = curr.u.x.values[i], uy = curr.u.y.values[i];
        e_kin += r * (ux * ux + uy * uy);
        mass += r;
    }
    const VectorField2 gux = gradient(curr.u.x), guy = gradient(curr.u.y);
    const VectorField2 gbx = gradient(curr.B.x), gby = gradient(curr.B.y);
    auto sq_l2 = [&](const VectorField2& v) {
        double s = 0.0;
        for (size_t i = 0; i < v.x.values.size(); ++i)
            s += v.x.values[i] * v.x.values[i] + v.y.values[i] * v.y.values[i];
        return s * h2;
    };

    // Centered du/dt when a later state is known, one-sided at the last step.
    const double denom = next ? 2.0 * dt : dt;
    const State& fwd = next ? *next : curr;
    const State& bwd = prev;
    double sr_ut = 0.0, bt = 0.0;
    for (size_t i = 0; i < curr.rho.values.size(); ++i) {
        const double utx = (fwd.u.x.values[i] - bwd.u.x.values[i]) / denom;
        const double uty = (fwd.u.y.values[i] - bwd.u.y.values[i]) / denom;
        const double btx = (fwd.B.x.values[i] - bwd.B.x.values[i]) / denom;
        const double bty = (fwd.B.y.values[i] - bwd.B.y.values[i]) / denom;
        sr_ut += std::max(curr.rho.values[i], 0.0) * (utx * utx + uty * uty);
        bt += btx * btx + bty * bty;
    }

    row[0] = curr.t;
    row[1] = 0.5 * e_kin * h2;
    row[2] = 0.5 * sq_l2(curr.B);
    row[3] = sq_l2(gux) + sq_l2(guy);
    row[4] = sq_l2(gbx) + sq_l2(gby);
    row[5] = field_min(curr.rho);
    row[6] = field_max(curr.rho);
    row[7] = mass * h2;
    row[8] = norm_lp(curr.u, 2.0);
    row[9] = norm_linf(curr.u);
    row[10] = norm_linf(curr.B);
    row[11] = norm_hs(curr.u, 1.0);
    row[12] = norm_hs(curr.B, 1.0);
    row[13] = norm_hs(curr.u, 2.0);
    row[14] = norm_hs(curr.B, 2.0);
    row[15] = norm_hs(curr.u, 3.0);
    row[16] = norm_hs(curr.B, 3.0);
    row[17] = std::sqrt(sr_ut * h2);
    row[18] = std::sqrt(bt * h2);
    row[19] = max_abs_divergence(curr.u);
    row[20] = max_abs_divergence(curr.B);
    return row;
}

}  // namespace detail

/// Integrate from the given initial state, recording every step in the series
/// and every snapshot_every-th state in the trajectory. On an aborted step the
/// partial trajectory is returned with the failure flagged.
inline RunResult run_from(const State& initial, const SolverConfig& cfg, double t_end,
                          int snapshot_every) {
    cfg.validate();
    if (t_end < 0.0) throw std::invalid_argument("run: t_end must be >= 0");
    if (snapshot_every < 1) throw std::invalid_argument("run: snapshot_every must be >= 1");

    const long steps = std::lround(t_end / cfg.dt);
    RunResult out;
    out.trajectory.dt_snapshot = cfg.dt * snapshot_every;
    out.trajectory.states.push_back(initial);
    const double rho_ref = field_max(initial.rho);

    State prev = initial;
    State curr = initial;
    StepScratch scratch;
    for (long i = 1; i <= steps; ++i) {
        StepDiagnostics diag;
        try {
            State next = step_ex(curr, cfg, &diag, rho_ref, &scratch);
            if (diag.cfl_warning) ++out.cfl_warning_steps;
            out.floor_activations += diag.floored_points;
            if (i > 1) out.series.append_row(detail::series_row(prev, curr, &next, cfg.dt));
            prev = std::move(curr);
            curr = std::move(next);
        } catch (const SolverError& err) {
            if (i > 1) out.series.append_row(detail::series_row(prev, curr, nullptr, cfg.dt));
            out.failed = true;
            out.failure_message = err.what();
            return out;
        }
        if (i % snapshot_every == 0) out.trajectory.states.push_back(curr);
    }
    if (steps > 0) out.series.append_row(detail::series_row(prev, curr, nullptr, cfg.dt));
    return out;
}

// ---------------------------------------------------------------------------
// Compatibility residual of initial data
// ---------------------------------------------------------------------------

struct CompatibilityReport {
    double g_norm = 0.0;          // L2 norm of rho^(-1/2) (F - grad P0) where rho > delta
    ScalarField P0;               // potential making F - grad P0 divergence-free
    double vacuum_residual = 0.0; // L2 mass of F - grad P0 on the near-vacuum set
};

/// F = -Laplacian(u0) - (B0 . grad) B0; P0 is the Helmholtz potential of F.
/// The weighted residual g = rho^(-1/2) (F - grad P0) is reported on the
/// region where rho0 > delta * max(rho0), and the unweighted leftover mass on
/// the complement.
inline CompatibilityReport compatibility_residual(const ScalarField& rho0,
                                                  const VectorField2& u0,
                                                  const VectorField2& B0, double delta) {
    if (max_abs_divergence(u0) > 1e-10 || max_abs_divergence(B0) > 1e-10)
        throw std::invalid_argument("compatibility_residual: initial fields must be solenoidal");
    const Grid& g = rho0.grid;
    VectorField2 F = laplacian(u0);
    F *= -1.0;
    F -= detail::advective_term(B0, B0);

    CompatibilityReport rep{0.0, helmholtz_potential(F), 0.0};
    const VectorField2 gp = gradient(rep.P0);
    const double cutoff = delta * field_max(rho0);
    const double h2 = g.spacing() * g.spacing();
    double g_sq = 0.0, off_sq = 0.0;
    for (size_t i = 0; i < rho0.values.size(); ++i) {
        const double rx = F.x.values[i] - gp.x.values[i];
        const double ry = F.y.values[i] - gp.y.values[i];
        const double mag2 = rx * rx + ry * ry;
        const double r = rho0.values[i];
        if (r > cutoff)
            g_sq += mag2 / r;
        else
            off_sq += mag2;
    }
    rep.g_norm = std::sqrt(g_sq * h2);
    rep.vacuum_residual = std::sqrt(off_sq * h2);
    return rep;
}

/// Advisory time step: cfl * spacing / max |u|.
inline double cfl_dt(const State& state, double cfl = 0.5) {
    const double umax = max_abs(state.u);
    return umax > 0.0 ? cfl * state.grid().spacing() / umax
                      : std::numeric_limits<double>::infinity();
}

}  // namespace mhd2d
