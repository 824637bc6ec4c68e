#pragma once

#include <numbers>
#include <stdexcept>

namespace mhd2d {

/// Uniform periodic grid on the square torus [0, 2*pi)^2.
///
/// The number of points per side must be a power of two (>= 16) so that
/// all transforms stay in the fast radix paths and the two-thirds dealias
/// cut is representable.
struct Grid {
    int n = 0;
    double length = 2.0 * std::numbers::pi_v<double>;

    explicit Grid(int points_per_side) : n(points_per_side) {
        if (n < 16 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Grid: points per side must be a power of two >= 16");
    }

    double spacing() const { return length / n; }
    long size() const { return static_cast<long>(n) * n; }

    /// Physical coordinate of sample index i along either axis.
    double coord(int i) const { return spacing() * i; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n == b.n && a.length == b.length;
    }
};

}  // namespace mhd2d
