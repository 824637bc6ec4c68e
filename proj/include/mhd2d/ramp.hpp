#pragma once

#include <cmath>

namespace mhd2d {

/// exp(-1/t) for t > 0, identically 0 otherwise.
inline double bump_eta(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// C-infinity ramp: exactly 0 for t <= 0, exactly 1 for t >= 1, strictly
/// increasing in between. Shared by the frequency partition and the
/// vacuum-bubble density profile.
inline double smooth_ramp(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = bump_eta(t);
    return a / (a + bump_eta(1.0 - t));
}

}  // namespace mhd2d
