#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rch/contact.hpp"
#include "rch/error.hpp"
#include "rch/manifold.hpp"

namespace rch {

// Critical circle of the action functional in class g: the Reeb field at
// height z_root points along (m, l) and the closed geodesic there is a
// periodic orbit of action 2*pi*sqrt(m^2 + l^2).
struct OrbitCircle {
    ContactFamily family = ContactFamily::linear(1);
    HomotopyClass2 g;
    double theta_g = 0.0;  // atan2(l, m) in [0, 2*pi)
    double z_root = 0.0;
    double action = 0.0;
    int index = 0;  // position among the circles of g, ordered by z_root
};

enum class GeneratorRole { minimum, maximum };

// Symmetry-broken generator of a critical circle: the minimum carries Morse
// index 0 and the maximum index 1.
struct Generator {
    HomotopyClass2 g;
    int circle = 0;
    GeneratorRole role = GeneratorRole::minimum;
    int morse_index = 0;

    std::string id() const {
        return "g" + class_to_string(g) + "/c" + std::to_string(circle) +
               (role == GeneratorRole::minimum ? "/min" : "/max");
    }
    bool operator==(const Generator& o) const {
        return g == o.g && circle == o.circle && role == o.role && morse_index == o.morse_index;
    }
};

inline double class_direction(const HomotopyClass2& g) {
    double t = std::atan2(static_cast<double>(g.l), static_cast<double>(g.m));
    if (t < 0.0) t += two_pi;
    return t;
}

// All heights z in [0, 2*pi) with H(z) = theta_g (mod 2*pi). For Linear(n)
// these are z_j = (theta_g + 2*pi*j)/n, j = 0..n-1.
inline std::vector<OrbitCircle> enumerate_orbits(const ContactFamily& f,
                                                 const HomotopyClass2& g) {
    if (g.is_zero()) throw error("undefined-direction", "class (0,0) has no direction");
    if (!f.monotone()) throw error("invalid-family", "profile h is not strictly increasing");

    const double theta = class_direction(g);
    const double offset = f.fiber_offset();
    const double H0 = f.theta(0.0);
    const double action = two_pi * std::hypot(static_cast<double>(g.m), static_cast<double>(g.l));

    std::vector<OrbitCircle> circles;
    const long long j_lo = static_cast<long long>(std::ceil((H0 - theta) / two_pi - 1e-9));
    for (long long j = j_lo;; ++j) {
        const double y = theta + two_pi * static_cast<double>(j);
        if (y >= H0 + offset - 1e-9) break;
        double z = f.theta_inverse(y);
        if (z >= two_pi - 1e-12) z -= two_pi;
        if (z < 0.0) z = 0.0;
        OrbitCircle c;
        c.family = f;
        c.g = g;
        c.theta_g = theta;
        c.z_root = z;
        c.action = action;
        c.index = static_cast<int>(circles.size());
        circles.push_back(c);
    }
    return circles;
}

// Action as the line integral of alpha along the closed geodesic
// representative, evaluated by quadrature; equals 2*pi*sqrt(m^2 + l^2).
inline double action_of(const OrbitCircle& c, int intervals = 256) {
    const Vec3 speed{two_pi * c.g.m, two_pi * c.g.l, 0.0};
    auto integrand = [&](double t) {
        const Lift p{speed.x * t, speed.y * t, c.z_root};
        return alpha_raw(c.family, p)(speed);
    };
    double sum = 0.5 * (integrand(0.0) + integrand(1.0));
    for (int i = 1; i < intervals; ++i) sum += integrand(static_cast<double>(i) / intervals);
    return sum / intervals;
}

// Two-vertex lift of the closed geodesic, for winding checks.
inline std::vector<Lift> closed_geodesic(const OrbitCircle& c) {
    return {{0.0, 0.0, c.z_root}, {two_pi * c.g.m, two_pi * c.g.l, c.z_root}};
}

// 1-periodic normal variation eta sampled on a uniform grid over [0, 1).
struct EtaVariation {
    std::vector<double> values;

    static EtaVariation from_function(const std::function<double(double)>& f, int grid) {
        EtaVariation eta;
        eta.values.resize(grid);
        for (int i = 0; i < grid; ++i) eta.values[i] = f(static_cast<double>(i) / grid);
        return eta;
    }

    double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    bool is_mean_zero(double tol = 1e-9) const { return std::abs(mean()) <= tol; }

    EtaVariation mean_adjusted() const {
        EtaVariation out = *this;
        const double m = mean();
        for (double& v : out.values) v -= m;
        return out;
    }
};

// Second variation at a critical circle. tau vanishes identically for both
// families, so the quadratic form reduces to the derivative energy of eta.
inline double second_variation(const OrbitCircle& c, const EtaVariation& eta) {
    (void)c;
    const std::size_t n = eta.values.size();
    if (n < 4) throw error("insufficient-resolution", "eta grid must have >= 4 samples");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = eta.values[(i + 1) % n] - eta.values[i];
        sum += d * d;
    }
    return sum * static_cast<double>(n);
}

// Replace the degenerate circle by its two nondegenerate generators.
inline std::pair<Generator, Generator> break_symmetry(const OrbitCircle& c) {
    Generator mn{c.g, c.index, GeneratorRole::minimum, 0};
    Generator mx{c.g, c.index, GeneratorRole::maximum, 1};
    return {mn, mx};
}

}  // namespace rch
