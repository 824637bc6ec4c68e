#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "grid.hpp"

namespace mhd2d {

/// Real scalar samples on a periodic grid, row-major with the y index outer
/// and the x index inner.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    explicit ScalarField(const Grid& g) : grid(g), values(g.size(), 0.0) {}

    double& at(int iy, int ix) { return values[static_cast<size_t>(iy) * grid.n + ix]; }
    double at(int iy, int ix) const { return values[static_cast<size_t>(iy) * grid.n + ix]; }

    ScalarField& operator+=(const ScalarField& o) {
        for (size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        for (size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    ScalarField& operator*=(double a) {
        for (double& v : values) v *= a;
        return *this;
    }
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double a, ScalarField f) { return f *= a; }

/// Fill a field from a function of the physical coordinates.
inline ScalarField make_scalar(const Grid& g, const std::function<double(double, double)>& fn) {
    ScalarField f(g);
    for (int iy = 0; iy < g.n; ++iy) {
        const double y = g.coord(iy);
        for (int ix = 0; ix < g.n; ++ix) f.at(iy, ix) = fn(g.coord(ix), y);
    }
    return f;
}

inline double field_min(const ScalarField& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}
inline double field_max(const ScalarField& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}
inline double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}
inline bool all_finite(const ScalarField& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Two-component vector field; both components share one grid.
struct VectorField2 {
    ScalarField x;
    ScalarField y;

    explicit VectorField2(const Grid& g) : x(g), y(g) {}
    VectorField2(ScalarField fx, ScalarField fy) : x(std::move(fx)), y(std::move(fy)) {
        if (!(x.grid == y.grid))
            throw std::invalid_argument("VectorField2: components must share one grid");
    }

    const Grid& grid() const { return x.grid; }

    VectorField2& operator+=(const VectorField2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    VectorField2& operator-=(const VectorField2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    VectorField2& operator*=(double a) {
        x *= a;
        y *= a;
        return *this;
    }
};

inline VectorField2 operator+(VectorField2 a, const VectorField2& b) { return a += b; }
inline VectorField2 operator-(VectorField2 a, const VectorField2& b) { return a -= b; }
inline VectorField2 operator*(double a, VectorField2 v) { return v *= a; }

inline VectorField2 make_vector(const Grid& g,
                                const std::function<double(double, double)>& fx,
                                const std::function<double(double, double)>& fy) {
    return {make_scalar(g, fx), make_scalar(g, fy)};
}

inline double max_abs(const VectorField2& v) {
    double m = 0.0;
    for (size_t i = 0; i < v.x.values.size(); ++i)
        m = std::max(m, std::hypot(v.x.values[i], v.y.values[i]));
    return m;
}
inline bool all_finite(const VectorField2& v) { return all_finite(v.x) && all_finite(v.y); }

}  // namespace mhd2d
