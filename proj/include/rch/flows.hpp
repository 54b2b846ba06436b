#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rch/contact.hpp"
#include "rch/error.hpp"
#include "rch/geometry.hpp"
#include "rch/manifold.hpp"

namespace rch {

// ---------------------------------------------------------------------------
// Transport maps. psi_s flows along the Reeb field xi (z stays constant, so
// the closed form is exact); phi_s flows along v, which integrates to
// z(s) = H^{-1}(H(z) + s) since H(z(s)) advances at unit rate.

inline Lift psi_lift(const ContactFamily& f, const Lift& q, double s) {
    const double t = f.theta(q.z);
    return {q.x + s * std::cos(t), q.y + s * std::sin(t), q.z};
}

inline TorusPoint psi(const ContactFamily& f, const TorusPoint& q, double s) {
    return normalize(psi_lift(f, q.lift(), s), f.gluing());
}

inline Lift phi_lift(const ContactFamily& f, const Lift& q, double s) {
    return {q.x, q.y, f.theta_inverse(f.theta(q.z) + s)};
}

inline TorusPoint phi(const ContactFamily& f, const TorusPoint& q, double s) {
    return normalize(phi_lift(f, q.lift(), s), f.gluing());
}

// Classical fourth-order one-step integration, kept as an independent oracle
// for the closed-form transport maps.
inline Lift integrate_flow(const FieldEvaluator& field, const Lift& q, double s, int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_flow: steps must be >= 1");
    const double dt = s / steps;
    Lift p = q;
    for (int i = 0; i < steps; ++i) {
        const Vec3 k1 = field(p);
        const Vec3 k2 = field(p.shifted(k1, 0.5 * dt));
        const Vec3 k3 = field(p.shifted(k2, 0.5 * dt));
        const Vec3 k4 = field(p.shifted(k3, dt));
        p = {p.x + dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
             p.y + dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
             p.z + dt / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
    }
    return p;
}

// ---------------------------------------------------------------------------
// Fredholm quantity (phi_s^* alpha)(xi): the v-transport carries xi across
// the fiber, and pairing with alpha at the image gives
// cos(H(z_s)) cos(H(z)) + sin(H(z_s)) sin(H(z)) = cos(s).

inline double fredholm_value(const ContactFamily& f, const TorusPoint& q, double s) {
    const double t0 = f.theta(q.z);
    const double t1 = f.theta(phi_lift(f, q.lift(), s).z);
    return std::cos(t1) * std::cos(t0) + std::sin(t1) * std::sin(t0);
}

struct FredholmReport {
    double s_max = 0.0;
    int samples = 0;
    double sup = 0.0;
    std::vector<double> argmax;  // maximizers within 1e-9 of sup, ascending
    bool violated = false;       // sup reaches 1 at some s != 0
};

namespace detail {

// Golden-section maximization of a smooth scalar on [lo, hi].
template <typename F>
inline std::pair<double, double> golden_max(const F& g, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    const double s = 0.5 * (a + b);
    return {s, g(s)};
}

}  // namespace detail

// Scan g(s) = (phi_s^* alpha)(xi) over s in (0, s_max]. Interior local maxima
// of the sample grid are refined; the open left endpoint is not chased, so a
// decreasing g reports the value at the smallest sample.
inline FredholmReport fredholm_scan(const ContactFamily& f, const TorusPoint& q, double s_max,
                                    int samples) {
    if (!(s_max > 0.0)) throw std::invalid_argument("fredholm_scan: s_max must be > 0");
    if (samples < 2) throw std::invalid_argument("fredholm_scan: samples must be >= 2");

    FredholmReport r;
    r.s_max = s_max;
    r.samples = samples;
    auto g = [&](double s) { return fredholm_value(f, q, s); };

    std::vector<double> ss(samples), vs(samples);
    for (int i = 1; i <= samples; ++i) {
        ss[i - 1] = s_max * i / samples;
        vs[i - 1] = g(ss[i - 1]);
    }

    std::vector<std::pair<double, double>> candidates;
    candidates.emplace_back(ss.front(), vs.front());
    candidates.emplace_back(ss.back(), vs.back());
    for (int i = 1; i + 1 < samples; ++i)
        if (vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1])
            candidates.push_back(detail::golden_max(g, ss[i - 1], ss[i + 1]));
    if (samples >= 2 && vs[samples - 1] >= vs[samples - 2])
        candidates.push_back(detail::golden_max(g, ss[samples - 2], ss[samples - 1]));

    r.sup = -2.0;
    for (const auto& c : candidates) r.sup = std::max(r.sup, c.second);
    std::vector<double> arg;
    for (const auto& c : candidates)
        if (c.second >= r.sup - 1e-9) arg.push_back(c.first);
    std::sort(arg.begin(), arg.end());
    for (double s : arg)
        if (r.argmax.empty() || s - r.argmax.back() > 1e-6) r.argmax.push_back(s);
    r.violated = r.sup >= 1.0 - 1e-9;
    return r;
}

// ---------------------------------------------------------------------------
// Conjugate points: parameters s where the v-transport carries alpha onto
// itself, i.e. H(z_s) - H(z) lands in 2*pi*Z.

inline double conjugacy_residual(const ContactFamily& f, double z, double s) {
    const double t0 = f.theta(z);
    const double t1 = f.theta(phi_lift(f, Lift{0.0, 0.0, z}, s).z);
    return std::max(std::abs(std::cos(t1) - std::cos(t0)), std::abs(std::sin(t1) - std::sin(t0)));
}

inline double conjugacy_residual(const ContactFamily& f, const TorusPoint& q, double s) {
    return conjugacy_residual(f, q.z, s);
}

struct ConjugatePoint {
    double s = 0.0;
    TorusPoint image;
    int winding = 0;       // k with H(z') - H(z) = 2*pi*k
    bool same_fiber = false;
    double residual = 0.0;
};

struct ConjugatePointList {
    TorusPoint base;
    double window = 0.0;
    std::vector<ConjugatePoint> points;  // sorted by s
};

inline ConjugatePointList conjugate_points(const ContactFamily& f, const TorusPoint& q,
                                           double window) {
    if (!(window > 0.0)) throw std::invalid_argument("conjugate_points: window must be > 0");
    if (!f.monotone()) throw error("invalid-family", "profile h is not strictly increasing");

    ConjugatePointList out;
    out.base = q;
    out.window = window;

    // G is monotone increasing in s, so bracketing on a uniform scan at
    // resolution window/1024 cannot miss a crossing of 2*pi for n <= 16.
    auto G = [&](double s) { return f.theta(phi_lift(f, q.lift(), s).z) - f.theta(q.z); };
    const int scan = 1024;
    std::vector<double> gs(scan + 1);
    for (int i = 0; i <= scan; ++i) gs[i] = G(window * i / scan);

    const int k_max = static_cast<int>(std::floor((gs.back() + 1e-9) / two_pi));
    for (int k = 1; k <= k_max; ++k) {
        const double target = two_pi * k;
        int i = 0;
        while (i < scan && gs[i + 1] < target) ++i;
        double lo = window * i / scan, hi = window * std::min(i + 1, scan) / scan;
        if (gs[std::min(i + 1, scan)] < target) hi = window;  // endpoint root
        for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (G(mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        ConjugatePoint cp;
        cp.s = std::min(0.5 * (lo + hi), window);
        const Lift img = phi_lift(f, q.lift(), cp.s);
        cp.image = normalize(img, f.gluing());
        cp.winding = k;
        cp.same_fiber = angle_distance(img.z, q.z) < 1e-7;
        cp.residual = conjugacy_residual(f, q.z, cp.s);
        out.points.push_back(cp);
    }
    return out;
}

}  // namespace rch
