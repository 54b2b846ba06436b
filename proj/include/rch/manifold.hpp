#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "rch/error.hpp"
#include "rch/geometry.hpp"

namespace rch {

// Point of T^3 (or of a torus bundle Y_A) with all coordinates in [0, 2*pi).
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Lift lift() const { return {x, y, z}; }
};

// Integer 2x2 gluing matrix A in SL2(Z), row-major [[a, b], [c, d]].
// The bundle identification is (x, y, z + 2*pi) ~ (A(x, y), z).
struct GluingMatrix {
    long long a = 1, b = 0;
    long long c = 0, d = 1;

    static GluingMatrix identity() { return {1, 0, 0, 1}; }

    long long det() const { return a * d - b * c; }
    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }

    // Inverse of a determinant-one matrix.
    GluingMatrix inverse() const { return {d, -b, -c, a}; }

    void apply(double& x, double& y) const {
        double nx = static_cast<double>(a) * x + static_cast<double>(b) * y;
        double ny = static_cast<double>(c) * x + static_cast<double>(d) * y;
        x = nx;
        y = ny;
    }

    bool operator==(const GluingMatrix& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
};

inline void require_unimodular(const GluingMatrix& A) {
    if (A.det() != 1)
        throw error("invalid-gluing", "gluing matrix must have determinant 1");
}

// Homotopy class g = m*xbar + l*ybar of the two-torus.
struct HomotopyClass2 {
    int m = 0;
    int l = 0;

    bool operator==(const HomotopyClass2& o) const { return m == o.m && l == o.l; }
    bool is_zero() const { return m == 0 && l == 0; }
};

// Class in Pi_1(T^3) = Z^3; p is the fiber winding.
struct HomotopyClass3 {
    int m = 0;
    int l = 0;
    int p = 0;

    bool operator==(const HomotopyClass3& o) const {
        return m == o.m && l == o.l && p == o.p;
    }
};

// Projection Pi_1(T^3) -> Z onto the fiber component.
inline int p3_projection(const HomotopyClass3& c) { return c.p; }

// Reduce a raw coordinate triple to the fundamental domain. Every downward
// 2*pi crossing of z applies the gluing to (x, y); upward crossings apply
// the inverse. Identity gluing reduces to plain mod-2*pi wrap-around.
inline TorusPoint normalize(const Lift& q, const GluingMatrix& A = GluingMatrix::identity()) {
    if (!std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(q.z))
        throw error("invalid-coordinate", "coordinates must be finite");
    require_unimodular(A);

    double z = q.z;
    long long k = static_cast<long long>(std::floor(z / two_pi));
    z -= two_pi * static_cast<double>(k);
    if (z >= two_pi) {
        z -= two_pi;
        ++k;
    }
    if (z < 0.0) {
        z += two_pi;
        --k;
    }

    double x = q.x, y = q.y;
    if (!A.is_identity()) {
        const GluingMatrix step = k >= 0 ? A : A.inverse();
        for (long long i = 0; i < std::llabs(k); ++i) step.apply(x, y);
    }
    return {wrap_angle(x), wrap_angle(y), wrap_angle(z)};
}

inline TorusPoint normalize(double x, double y, double z,
                            const GluingMatrix& A = GluingMatrix::identity()) {
    return normalize(Lift{x, y, z}, A);
}

// Equality of points up to coordinate wrap, tolerance 1e-9 by default.
inline bool same_point(const TorusPoint& p, const TorusPoint& q, double tol = 1e-9) {
    return angle_distance(p.x, q.x) <= tol && angle_distance(p.y, q.y) <= tol &&
           angle_distance(p.z, q.z) <= tol;
}

// A closed polyline given by lifts on the cover; returns the accumulated
// integer winding (m, l, p). Only the identity gluing admits the Z^3 reading.
inline HomotopyClass3 class_of_polyline(const std::vector<Lift>& vertices,
                                        const GluingMatrix& A = GluingMatrix::identity()) {
    if (!A.is_identity())
        throw error("unsupported-gluing",
                    "Z^3 winding decomposition requires the identity gluing");
    if (vertices.size() < 2)
        throw error("not-a-loop", "polyline needs at least two vertices");
    const TorusPoint first = normalize(vertices.front(), A);
    const TorusPoint last = normalize(vertices.back(), A);
    if (!same_point(first, last))
        throw error("not-a-loop", "polyline does not close up in the quotient");

    auto winding = [](double from, double to) {
        double w = (to - from) / two_pi;
        double r = std::round(w);
        if (std::abs(w - r) > 1e-6)
            throw error("not-a-loop", "net coordinate change is not a 2*pi multiple");
        return static_cast<int>(r);
    };
    return {winding(vertices.front().x, vertices.back().x),
            winding(vertices.front().y, vertices.back().y),
            winding(vertices.front().z, vertices.back().z)};
}

inline std::string class_to_string(const HomotopyClass2& g) {
    return "(" + std::to_string(g.m) + "," + std::to_string(g.l) + ")";
}

}  // namespace rch
