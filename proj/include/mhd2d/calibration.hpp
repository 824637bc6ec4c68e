#pragma once

// Calibrated suprema of the inequality probes, recorded once on the reference
// configuration (regenerate with tools/calibrate > include/mhd2d/calibration.hpp).
// The verification suites assert that fresh measurements stay within 5% of
// these values; the inequalities themselves only promise boundedness, so the
// recorded constant is the testable surrogate.

namespace mhd2d::calibration {

inline constexpr double bernstein_p2_sup = 0.6365803061487596;
inline constexpr double log_sobolev_q4_sup = 0.087365977010487525;
inline constexpr double time_integrated_q4_sup = 0.39420640182538924;
inline constexpr double stokes_q43_sup = 1.0679744299488632;
inline constexpr double stokes_q4_sup = 0.46181956932881313;
inline constexpr double poisson_q43_sup = 1.4507272961271105;
inline constexpr double poisson_q4_sup = 0.55951588467389057;

}  // namespace mhd2d::calibration
