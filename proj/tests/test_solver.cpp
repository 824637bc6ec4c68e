#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "mhd2d/estimates.hpp"
#include "mhd2d/scenarios.hpp"

using namespace mhd2d;
using std::numbers::pi;

namespace {
const Grid g32(32);

State zero_state(const Grid& g, double rho_val = 1.0) {
    return {0.0, make_scalar(g, [rho_val](double, double) { return rho_val; }),
            VectorField2(g), VectorField2(g)};
}
}  // namespace

TEST_CASE("density advection") {
    SECTION("zero velocity leaves the field untouched") {
        SplitMix64 rng(31);
        const ScalarField rho = random_band_limited(g32, 5, rng);
        const AdvectResult out = advect_density(rho, VectorField2(g32), 1e-3);
        CHECK(out.rho.values == rho.values);
        CHECK_FALSE(out.cfl_warning);
    }

    SECTION("lattice-aligned uniform transport is an exact shift") {
        SplitMix64 rng(32);
        const ScalarField rho = random_band_limited(g32, 5, rng);
        const VectorField2 u = make_vector(g32, [](double, double) { return 1.0; },
                                           [](double, double) { return 0.0; });
        const AdvectResult out = advect_density(rho, u, g32.spacing());
        for (int iy = 0; iy < g32.n; ++iy)
            for (int ix = 0; ix < g32.n; ++ix)
                CHECK(std::abs(out.rho.at(iy, ix) - rho.at(iy, (ix + g32.n - 1) % g32.n)) <=
                      1e-13);
    }

    SECTION("range bounds hold exactly") {
        SplitMix64 rng(33);
        for (int trial = 0; trial < 5; ++trial) {
            const ScalarField rho = random_band_limited(g32, 7, rng);
            const VectorField2 u = random_band_limited_vector(g32, 5, rng);
            const AdvectResult out = advect_density(rho, u, 2e-3);
            CHECK(field_min(out.rho) >= field_min(rho));
            CHECK(field_max(out.rho) <= field_max(rho));
        }
    }

    SECTION("large step trips the warning flag") {
        const VectorField2 u = make_vector(g32, [](double, double) { return 1.0; },
                                           [](double, double) { return 0.0; });
        const ScalarField rho = make_scalar(g32, [](double, double) { return 1.0; });
        CHECK(advect_density(rho, u, 10.0 * g32.spacing()).cfl_warning);
        CHECK_FALSE(advect_density(rho, u, 0.5 * g32.spacing()).cfl_warning);
    }
}

TEST_CASE("momentum step") {
    SolverConfig cfg;
    cfg.dt = 1e-2;

    SECTION("shear magnetic field exerts no force on a resting fluid") {
        State s = zero_state(g32);
        s.B = make_vector(g32, [](double, double y) { return std::sin(y); },
                          [](double, double) { return 0.0; });
        s.rho = vacuum_bubble_density(g32);
        CHECK(max_abs(momentum_step(s, cfg)) == 0.0);
    }

    SECTION("taylor-green one step matches the exact decay after projection") {
        State s = make_initial_state({ScenarioKind::taylor_green}, g32);
        const VectorField2 u_star = momentum_step(s, cfg);
        const VectorField2 projected = leray_project(u_star);
        const VectorField2 want = std::exp(-2.0 * cfg.dt) * s.u;
        CHECK(max_abs(projected - want) <= 3.0 * cfg.dt * cfg.dt * max_abs(s.u));
    }

    SECTION("agrees with a fine explicit stepper to second order") {
        SplitMix64 rng(35);
        State s = zero_state(g32);
        s.u = leray_project(random_band_limited_vector(g32, 4, rng));
        s.u *= 0.3 / std::max(max_abs(s.u), 1e-12);

        // Independent oracle: forward Euler on du/dt = Lap(u) - (u.grad)u at
        // one hundredth of the step. The one-step gap must shrink at second
        // order when the step is halved.
        auto gap = [&](double dt) {
            VectorField2 u_ref = s.u;
            const int substeps = 100;
            const double h = dt / substeps;
            for (int i = 0; i < substeps; ++i) {
                VectorField2 adv = dealias(detail::advective_term(u_ref, u_ref));
                const VectorField2 lap = laplacian(u_ref);
                for (size_t k = 0; k < u_ref.x.values.size(); ++k) {
                    u_ref.x.values[k] += h * (lap.x.values[k] - adv.x.values[k]);
                    u_ref.y.values[k] += h * (lap.y.values[k] - adv.y.values[k]);
                }
            }
            SolverConfig local = cfg;
            local.dt = dt;
            return max_abs(momentum_step(s, local) - u_ref);
        };
        const double coarse = gap(1e-2);
        const double fine = gap(5e-3);
        CHECK(coarse <= 1e-2);
        CHECK(coarse / fine == Approx(4.0).margin(1.2));
    }
}

TEST_CASE("pressure projection") {
    SolverConfig cfg;
    cfg.dt = 1e-3;

    SECTION("solenoidal input passes through") {
        State s = make_initial_state({ScenarioKind::taylor_green}, g32);
        const PressureResult pr = pressure_project(s.u, s.rho, cfg);
        CHECK(max_abs(gradient(pr.P)) <= 1e-10);
        CHECK(max_abs(pr.u - s.u) <= 1e-12);
    }

    SECTION("unit density reduces to the spectral projection") {
        SplitMix64 rng(36);
        const ScalarField one = make_scalar(g32, [](double, double) { return 1.0; });
        const VectorField2 v = random_band_limited_vector(g32, 6, rng);
        const PressureResult pr = pressure_project(v, one, cfg);
        CHECK(max_abs(pr.u - leray_project(v)) <= 1e-9);
    }

    SECTION("vacuum density still yields a solenoidal velocity") {
        const ScalarField rho = vacuum_bubble_density(g32);
        const VectorField2 v =
            gradient(make_scalar(g32, [](double x, double y) { return std::sin(x) * std::sin(y); }));
        const PressureResult pr = pressure_project(v, rho, cfg);
        CHECK(max_abs_divergence(pr.u) <= 1e-10);
        CHECK(pr.floored_points > 0);
    }

    SECTION("iteration budget is honored") {
        SolverConfig strict = cfg;
        strict.picard_max = 1;
        const ScalarField rho = vacuum_bubble_density(g32);
        const VectorField2 v =
            gradient(make_scalar(g32, [](double x, double y) { return std::sin(x) * std::sin(y); }));
        CHECK_THROWS_AS(pressure_project(v, rho, strict), SolverError);
    }
}

TEST_CASE("induction step") {
    SolverConfig cfg;
    cfg.dt = 2e-3;

    SECTION("pure diffusion decays at the exact single-mode rate") {
        State s = zero_state(g32);
        s.B = make_vector(g32, [](double, double y) { return std::sin(y); },
                          [](double, double) { return 0.0; });
        const VectorField2 want = std::exp(-cfg.dt) * s.B;
        CHECK(max_abs(induction_step(s, cfg) - want) <= 1e-12);
    }

    SECTION("zero field stays zero") {
        State s = zero_state(g32);
        s.u = make_vector(g32, [](double x, double y) { return std::sin(x) * std::cos(y); },
                          [](double x, double y) { return -std::cos(x) * std::sin(y); });
        CHECK(max_abs(induction_step(s, cfg)) == 0.0);
    }

    SECTION("result is solenoidal") {
        State s = make_initial_state({ScenarioKind::random_smooth, 77}, g32);
        CHECK(max_abs_divergence(induction_step(s, cfg)) <= 1e-10);
    }
}

TEST_CASE("composed step") {
    SolverConfig cfg;
    cfg.dt = 1e-3;

    SECTION("all-zero fields advance only the clock") {
        State s = zero_state(g32, 0.8);
        const State next = step(s, cfg);
        CHECK(next.t == Approx(cfg.dt));
        CHECK(next.rho.values == s.rho.values);
        CHECK(max_abs(next.u) == 0.0);
        CHECK(max_abs(next.B) == 0.0);
    }

    SECTION("resting vacuum state: exact magnetic decay, no flow") {
        State s = make_initial_state({ScenarioKind::mhd_rest}, g32);
        State cur = s;
        for (int i = 0; i < 10; ++i) cur = step(cur, cfg);
        CHECK(norm_linf(cur.u) <= 1e-10);
        CHECK(cur.rho.values == s.rho.values);
        const VectorField2 want = std::exp(-cur.t) * s.B;
        CHECK(max_abs(cur.B - want) <= 1e-11);
    }

    SECTION("taylor-green dissipates kinetic energy every step") {
        State cur = make_initial_state({ScenarioKind::taylor_green}, g32);
        double prev = detail::weighted_kinetic(cur.rho, cur.u);
        for (int i = 0; i < 10; ++i) {
            cur = step(cur, cfg);
            const double e = detail::weighted_kinetic(cur.rho, cur.u);
            CHECK(e < prev);
            prev = e;
        }
    }
}

TEST_CASE("run loop") {
    SolverConfig cfg;
    cfg.dt = 1e-3;

    SECTION("zero horizon records only the initial state") {
        const RunResult rr = run({ScenarioKind::taylor_green}, g32, cfg, 0.0, 5);
        CHECK(rr.trajectory.size() == 1);
        CHECK(rr.series.rows() == 0);
        CHECK_FALSE(rr.failed);
    }

    SECTION("state invariants hold along every preset") {
        for (const ScenarioKind kind :
             {ScenarioKind::taylor_green, ScenarioKind::mhd_rest, ScenarioKind::vacuum_bubble,
              ScenarioKind::random_smooth}) {
            const RunResult rr = run({kind, 11}, g32, cfg, 0.02, 5);
            REQUIRE_FALSE(rr.failed);
            for (const State& s : rr.trajectory.states) CHECK(check_state(s).empty());
            const auto& ek = rr.series["e_kin"];
            const auto& em = rr.series["e_mag"];
            for (size_t i = 1; i < ek.size(); ++i)
                CHECK(ek[i] + em[i] <= ek[i - 1] + em[i - 1] + 1e-12);
            const auto& divu = rr.series["div_u_max"];
            for (const double d : divu) CHECK(d <= 1e-10);
        }
    }

    SECTION("solver abort is reported, not thrown") {
        SolverConfig strict = cfg;
        strict.picard_max = 1;
        const RunResult rr = run({ScenarioKind::vacuum_bubble}, g32, strict, 0.01, 5);
        CHECK(rr.failed);
        CHECK_FALSE(rr.failure_message.empty());
        CHECK(rr.trajectory.size() >= 1);
    }

    SECTION("mass drift is small and shrinks under grid refinement") {
        auto drift = [&](const Grid& g) {
            const RunResult rr = run({ScenarioKind::vacuum_bubble}, g, cfg, 0.2, 50);
            REQUIRE_FALSE(rr.failed);
            const auto& mass = rr.series["rho_mass"];
            return std::abs(mass.back() - mass.front()) / mass.front();
        };
        const double d32 = drift(g32);
        const double d64 = drift(Grid(64));
        CHECK(d32 <= 2e-3);
        CHECK(d64 < d32);
    }
}

TEST_CASE("compatibility residual") {
    SECTION("trivial data has no residual") {
        const ScalarField rho = make_scalar(g32, [](double, double) { return 1.0; });
        const CompatibilityReport rep =
            compatibility_residual(rho, VectorField2(g32), VectorField2(g32), 1e-3);
        CHECK(rep.g_norm == 0.0);
        CHECK(max_abs(gradient(rep.P0)) <= 1e-12);
    }

    SECTION("resting shear field is force free") {
        const State s = make_initial_state({ScenarioKind::mhd_rest}, g32);
        const CompatibilityReport rep = compatibility_residual(s.rho, s.u, s.B, 1e-3);
        CHECK(rep.g_norm <= 1e-12);
        CHECK(rep.vacuum_residual <= 1e-12);
    }

    SECTION("taylor-green: the forcing is the Laplacian eigenvalue times u0") {
        const State s = make_initial_state({ScenarioKind::taylor_green}, g32);
        const CompatibilityReport rep = compatibility_residual(s.rho, s.u, s.B, 1e-3);
        CHECK(rep.g_norm == Approx(2.0 * norm_lp(s.u, 2.0)).epsilon(1e-10));
    }

    SECTION("rejects non-solenoidal input") {
        const ScalarField rho = make_scalar(g32, [](double, double) { return 1.0; });
        const VectorField2 bad = make_vector(
            g32, [](double x, double) { return std::sin(x); }, [](double, double) { return 0.0; });
        CHECK_THROWS_AS(compatibility_residual(rho, bad, VectorField2(g32), 1e-3),
                        std::invalid_argument);
    }
}

TEST_CASE("cfl helper") {
    State s = zero_state(g32);
    CHECK(std::isinf(cfl_dt(s)));
    s.u = make_vector(g32, [](double, double) { return 2.0; }, [](double, double) { return 0.0; });
    CHECK(cfl_dt(s, 0.5) == Approx(0.25 * g32.spacing()).epsilon(1e-13));
}
