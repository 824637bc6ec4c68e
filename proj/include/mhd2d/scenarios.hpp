#pragma once

#include <cstdint>
#include <string>

#include "ramp.hpp"
#include "rng.hpp"
#include "solver.hpp"

namespace mhd2d {

enum class ScenarioKind { taylor_green, mhd_rest, vacuum_bubble, random_smooth };

struct Scenario {
    ScenarioKind kind = ScenarioKind::taylor_green;
    std::uint64_t seed = 1;
    double amplitude = 1.0;
};

inline const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::taylor_green: return "taylor_green";
        case ScenarioKind::mhd_rest: return "mhd_rest";
        case ScenarioKind::vacuum_bubble: return "vacuum_bubble";
        case ScenarioKind::random_smooth: return "random_smooth";
    }
    return "?";
}

inline ScenarioKind scenario_from_name(const std::string& name) {
    if (name == "taylor_green") return ScenarioKind::taylor_green;
    if (name == "mhd_rest") return ScenarioKind::mhd_rest;
    if (name == "vacuum_bubble") return ScenarioKind::vacuum_bubble;
    if (name == "random_smooth") return ScenarioKind::random_smooth;
    throw ConfigError("unknown scenario '" + name +
                      "' (valid: taylor_green, mhd_rest, vacuum_bubble, random_smooth)");
}

/// Density profile that is exactly 0 inside radius 0.5 around the domain
/// center and exactly 1 outside radius 0.8, with a smooth transition.
inline ScalarField vacuum_bubble_density(const Grid& g) {
    const double cx = std::numbers::pi_v<double>, cy = cx;
    return make_scalar(g, [&](double x, double y) {
        const double d = std::hypot(x - cx, y - cy);
        return smooth_ramp((d - 0.5) / 0.3);
    });
}

namespace detail {

inline VectorField2 normalized_to(VectorField2 v, double target_linf) {
    const double m = max_abs(v);
    if (m > 0.0) v *= target_linf / m;
    return v;
}

}  // namespace detail

/// Construct initial data for a scenario on the given grid. All presets
/// satisfy the State invariants (rho >= 0, solenoidal u and B).
inline State make_initial_state(const Scenario& sc, const Grid& g) {
    const double a = sc.amplitude;
    switch (sc.kind) {
        case ScenarioKind::taylor_green: {
            ScalarField rho = make_scalar(g, [](double, double) { return 1.0; });
            VectorField2 u = make_vector(
                g, [a](double x, double y) { return a * std::sin(x) * std::cos(y); },
                [a](double x, double y) { return -a * std::cos(x) * std::sin(y); });
            return {0.0, std::move(rho), std::move(u), VectorField2(g)};
        }
        case ScenarioKind::mhd_rest: {
            VectorField2 B = make_vector(
                g, [a](double, double y) { return a * std::sin(y); },
                [](double, double) { return 0.0; });
            return {0.0, vacuum_bubble_density(g), VectorField2(g), std::move(B)};
        }
        case ScenarioKind::vacuum_bubble: {
            ScalarField rho = vacuum_bubble_density(g);
            // Fixed smooth carrier field; the projection of rho * w supplies a
            // solenoidal velocity that is active around the vacuum region.
            VectorField2 w = make_vector(
                g, [a](double, double y) { return 0.5 * a * std::sin(y); },
                [a](double x, double) { return 0.5 * a * std::sin(x); });
            for (size_t i = 0; i < w.x.values.size(); ++i) {
                w.x.values[i] *= rho.values[i];
                w.y.values[i] *= rho.values[i];
            }
            VectorField2 u = leray_project(w);
            VectorField2 B = make_vector(
                g, [a](double, double y) { return 0.1 * a * std::sin(y); },
                [](double, double) { return 0.0; });
            return {0.0, std::move(rho), std::move(u), std::move(B)};
        }
        case ScenarioKind::random_smooth: {
            SplitMix64 rng(sc.seed);
            ScalarField noise = random_band_limited(g, 4, rng);
            const double m = max_abs(noise);
            ScalarField rho(g);
            for (size_t i = 0; i < rho.values.size(); ++i)
                rho.values[i] =
                    std::max(1.0 + 0.5 * (m > 0.0 ? noise.values[i] / m : 0.0), 0.0);
            VectorField2 u = detail::normalized_to(
                leray_project(random_band_limited_vector(g, 4, rng)), 0.5 * a);
            VectorField2 B = detail::normalized_to(
                leray_project(random_band_limited_vector(g, 4, rng)), 0.25 * a);
            return {0.0, std::move(rho), std::move(u), std::move(B)};
        }
    }
    throw std::invalid_argument("make_initial_state: unknown scenario");
}

inline RunResult run(const Scenario& sc, const Grid& g, const SolverConfig& cfg, double t_end,
                     int snapshot_every) {
    return run_from(make_initial_state(sc, g), cfg, t_end, snapshot_every);
}

}  // namespace mhd2d
