#pragma once

#include <string>
#include <vector>

#include "norms.hpp"

namespace mhd2d {

/// Time-stamped solution triple (density, velocity, magnetic field).
/// Invariants: rho >= -1e-13 everywhere; max |div u|, |div B| <= 1e-10.
struct State {
    double t;
    ScalarField rho;
    VectorField2 u;
    VectorField2 B;

    const Grid& grid() const { return rho.grid; }
};

inline bool all_finite(const State& s) {
    return all_finite(s.rho) && all_finite(s.u) && all_finite(s.B);
}

/// Check the State invariants; returns an empty string when they hold.
inline std::string check_state(const State& s) {
    if (!all_finite(s)) return "non-finite field values";
    if (field_min(s.rho) < -1e-13) return "density below the nonnegativity tolerance";
    if (max_abs_divergence(s.u) > 1e-10) return "velocity divergence above 1e-10";
    if (max_abs_divergence(s.B) > 1e-10) return "magnetic divergence above 1e-10";
    return {};
}

/// Snapshots of a run at a uniform time cadence (uniformity is what makes the
/// centered time differencing in the estimate functionals well defined).
struct Trajectory {
    std::vector<State> states;
    double dt_snapshot = 0.0;

    double t_begin() const { return states.empty() ? 0.0 : states.front().t; }
    double t_end() const { return states.empty() ? 0.0 : states.back().t; }
    size_t size() const { return states.size(); }
};

}  // namespace mhd2d
