#pragma once

#include <cmath>
#include <vector>

#include "field.hpp"

namespace mhd2d {

/// Geometric multigrid for -div(beta grad P) on the periodic grid, used as a
/// symmetric preconditioner for the pressure Krylov solve. The operator at
/// each level is the 5-point face-coefficient discretization with harmonic
/// face averages, which keeps the cycle effective under the large coefficient
/// contrast a vacuum floor produces. One V(2,2) cycle from a zero guess is a
/// fixed symmetric positive definite linear map.
class MgPoisson {
  public:
    explicit MgPoisson(const ScalarField& beta) {
        int n = beta.grid.n;
        double h = beta.grid.spacing();
        std::vector<double> b = beta.values;
        while (true) {
            levels_.push_back(make_level(n, h, b));
            if (n <= 8) break;
            // Coarse coefficient: mean over the four child cells.
            const int nc = n / 2;
            std::vector<double> bc(static_cast<size_t>(nc) * nc);
            for (int iy = 0; iy < nc; ++iy)
                for (int ix = 0; ix < nc; ++ix) {
                    const int fy = 2 * iy, fx = 2 * ix;
                    bc[static_cast<size_t>(iy) * nc + ix] =
                        0.25 * (b[idx(fy, fx, n)] + b[idx(fy, fx + 1, n)] +
                                b[idx(fy + 1, fx, n)] + b[idx(fy + 1, fx + 1, n)]);
                }
            b = std::move(bc);
            n = nc;
            h *= 2.0;
        }
    }

    /// One V-cycle approximating the inverse, from a zero initial guess.
    ScalarField apply(const ScalarField& rhs) const {
        Level& fine = levels_.front();
        std::fill(fine.x.begin(), fine.x.end(), 0.0);
        fine.rhs = rhs.values;
        vcycle(0);
        ScalarField out(rhs.grid);
        out.values = fine.x;
        return out;
    }

    /// Action of the fine-level operator itself (for the Krylov wrapper).
    ScalarField operator_apply(const ScalarField& x) const {
        const Level& fine = levels_.front();
        ScalarField out(x.grid);
        apply_op(fine, x.values, out.values);
        return out;
    }

  private:
    struct Level {
        int n = 0;
        double h2 = 0.0;
        std::vector<double> bx, by;  // face coefficients toward +x / +y neighbors
        std::vector<double> inv_diag;
        mutable std::vector<double> x, rhs, res;
    };

    static size_t idx(int iy, int ix, int n) { return static_cast<size_t>(iy) * n + ix; }

    static Level make_level(int n, double h, const std::vector<double>& beta) {
        Level lv;
        lv.n = n;
        lv.h2 = h * h;
        const size_t cells = static_cast<size_t>(n) * n;
        lv.bx.resize(cells);
        lv.by.resize(cells);
        lv.inv_diag.resize(cells);
        lv.x.resize(cells);
        lv.rhs.resize(cells);
        lv.res.resize(cells);
        auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const double c = beta[idx(iy, ix, n)];
                lv.bx[idx(iy, ix, n)] = harmonic(c, beta[idx(iy, (ix + 1) & (n - 1), n)]);
                lv.by[idx(iy, ix, n)] = harmonic(c, beta[idx((iy + 1) & (n - 1), ix, n)]);
            }
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                const double d = lv.bx[idx(iy, ix, n)] + lv.bx[idx(iy, (ix - 1) & (n - 1), n)] +
                                 lv.by[idx(iy, ix, n)] + lv.by[idx((iy - 1) & (n - 1), ix, n)];
                lv.inv_diag[idx(iy, ix, n)] = lv.h2 / d;
            }
        return lv;
    }

    static void apply_op(const Level& lv, const std::vector<double>& x,
                         std::vector<double>& out) {
        const int n = lv.n;
        const double inv_h2 = 1.0 / lv.h2;
        for (int iy = 0; iy < n; ++iy) {
            const int ym = (iy - 1) & (n - 1), yp = (iy + 1) & (n - 1);
            for (int ix = 0; ix < n; ++ix) {
                const int xm = (ix - 1) & (n - 1), xp = (ix + 1) & (n - 1);
                const size_t c = idx(iy, ix, n);
                const double bxp = lv.bx[c], bxm = lv.bx[idx(iy, xm, n)];
                const double byp = lv.by[c], bym = lv.by[idx(ym, ix, n)];
                out[c] = inv_h2 * ((bxp + bxm + byp + bym) * x[c] - bxp * x[idx(iy, xp, n)] -
                                   bxm * x[idx(iy, xm, n)] - byp * x[idx(yp, ix, n)] -
                                   bym * x[idx(ym, ix, n)]);
            }
        }
    }

    static void jacobi(Level& lv, int sweeps) {
        constexpr double omega = 0.8;
        for (int s = 0; s < sweeps; ++s) {
            apply_op(lv, lv.x, lv.res);
            for (size_t i = 0; i < lv.x.size(); ++i)
                lv.x[i] += omega * lv.inv_diag[i] * (lv.rhs[i] - lv.res[i]);
        }
    }

    void vcycle(size_t depth) const {
        Level& lv = levels_[depth];
        if (depth + 1 == levels_.size()) {
            coarse_solve(lv);
            return;
        }
        jacobi(lv, 2);
        apply_op(lv, lv.x, lv.res);
        Level& next = levels_[depth + 1];
        const int nc = next.n;
        for (int iy = 0; iy < nc; ++iy)
            for (int ix = 0; ix < nc; ++ix) {
                const int fy = 2 * iy, fx = 2 * ix;
                next.rhs[idx(iy, ix, nc)] =
                    0.25 * ((lv.rhs[idx(fy, fx, lv.n)] - lv.res[idx(fy, fx, lv.n)]) +
                            (lv.rhs[idx(fy, fx + 1, lv.n)] - lv.res[idx(fy, fx + 1, lv.n)]) +
                            (lv.rhs[idx(fy + 1, fx, lv.n)] - lv.res[idx(fy + 1, fx, lv.n)]) +
                            (lv.rhs[idx(fy + 1, fx + 1, lv.n)] -
                             lv.res[idx(fy + 1, fx + 1, lv.n)]));
            }
        std::fill(next.x.begin(), next.x.end(), 0.0);
        vcycle(depth + 1);
        for (int iy = 0; iy < lv.n; ++iy)
            for (int ix = 0; ix < lv.n; ++ix)
                lv.x[idx(iy, ix, lv.n)] += next.x[idx(iy / 2, ix / 2, nc)];
        jacobi(lv, 2);
    }

    /// Coarsest level: plain CG down to machine precision (the system is tiny).
    static void coarse_solve(Level& lv) {
        const size_t m = lv.x.size();
        std::vector<double> r = lv.rhs, p(m), ap(m);
        std::fill(lv.x.begin(), lv.x.end(), 0.0);
        auto remove_mean = [m](std::vector<double>& v) {
            double mu = 0.0;
            for (double t : v) mu += t;
            mu /= static_cast<double>(m);
            for (double& t : v) t -= mu;
        };
        remove_mean(r);
        p = r;
        double rr = 0.0;
        for (double t : r) rr += t * t;
        const double rr0 = rr;
        if (rr0 == 0.0) return;
        for (size_t it = 0; it < 2 * m; ++it) {
            apply_op(lv, p, ap);
            double pap = 0.0;
            for (size_t i = 0; i < m; ++i) pap += p[i] * ap[i];
            if (pap <= 0.0) break;
            const double alpha = rr / pap;
            for (size_t i = 0; i < m; ++i) {
                lv.x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            remove_mean(r);
            double rr_next = 0.0;
            for (double t : r) rr_next += t * t;
            if (rr_next <= 1e-24 * rr0) break;
            const double beta = rr_next / rr;
            rr = rr_next;
            for (size_t i = 0; i < m; ++i) p[i] = r[i] + beta * p[i];
        }
    }

    mutable std::vector<Level> levels_;
};

}  // namespace mhd2d
