#pragma once

#include <cmath>
#include <numbers>

namespace rch {

inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

// Tangent vector in the (d/dx, d/dy, d/dz) frame.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double norm_inf() const {
        return std::max(std::abs(x), std::max(std::abs(y), std::abs(z)));
    }
};

inline Vec3 operator*(double c, const Vec3& v) { return v * c; }

// Point on the cover R^3 (unreduced coordinates). Flows and polylines keep
// lifts so that winding numbers stay recoverable.
struct Lift {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Lift shifted(const Vec3& v, double t) const {
        return {x + t * v.x, y + t * v.y, z + t * v.z};
    }
};

// Covector in the (dx, dy, dz) coframe.
struct Covec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double operator()(const Vec3& v) const { return x * v.x + y * v.y + z * v.z; }

    double norm_inf() const {
        return std::max(std::abs(x), std::max(std::abs(y), std::abs(z)));
    }
};

// 2-form with components on dx^dy, dx^dz, dy^dz.
struct TwoForm {
    double xy = 0.0;
    double xz = 0.0;
    double yz = 0.0;

    double operator()(const Vec3& u, const Vec3& w) const {
        return xy * (u.x * w.y - u.y * w.x) + xz * (u.x * w.z - u.z * w.x) +
               yz * (u.y * w.z - u.z * w.y);
    }

    // Contraction i_u F as a covector.
    Covec3 contract(const Vec3& u) const {
        return {-xy * u.y - xz * u.z, xy * u.x - yz * u.z, xz * u.x + yz * u.y};
    }
};

// Reduce an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    double r = a - two_pi * std::floor(a / two_pi);
    if (r >= two_pi) r -= two_pi;
    if (r < 0.0) r += two_pi;
    return r;
}

// Distance between angles modulo 2*pi.
inline double angle_distance(double a, double b) {
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, two_pi - d);
}

}  // namespace rch
