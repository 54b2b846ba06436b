#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rch/error.hpp"
#include "rch/geometry.hpp"
#include "rch/manifold.hpp"

namespace rch {

// Strictly increasing profile h driving a contact family. Either a closed
// form h(z) = n*z + eps*sin(k*z), or a sampled table on [0, 2*pi] with
// monotone-cubic interpolation. Values extend to all of R through the
// declared period offset: h(z + 2*pi) = h(z) + offset.
class MonotoneFunction {
public:
    enum class Kind { parametric, sampled };

    static MonotoneFunction parametric(int slope, double amplitude, int frequency) {
        if (slope < 1) throw error("invalid-family", "parametric slope must be >= 1");
        if (frequency < 1) throw error("invalid-family", "parametric frequency must be >= 1");
        if (amplitude < 0.0 || !std::isfinite(amplitude))
            throw error("invalid-family", "parametric amplitude must be finite and >= 0");
        MonotoneFunction f;
        f.kind_ = Kind::parametric;
        f.slope_ = slope;
        f.amplitude_ = amplitude;
        f.frequency_ = frequency;
        f.offset_ = two_pi * slope;
        return f;
    }

    static MonotoneFunction sampled(std::vector<double> zs, std::vector<double> hs,
                                    double offset) {
        if (zs.size() != hs.size() || zs.size() < 2)
            throw error("invalid-family", "sampled table needs matching columns, >= 2 rows");
        if (std::abs(zs.front()) > 1e-9 || std::abs(zs.back() - two_pi) > 1e-9)
            throw error("invalid-family", "sampled table must span z = 0 .. 2*pi");
        for (std::size_t i = 1; i < zs.size(); ++i)
            if (!(zs[i] > zs[i - 1]) || !(hs[i] > hs[i - 1]))
                throw error("invalid-family", "sampled table must be strictly increasing");
        if (!std::isfinite(offset))
            throw error("invalid-family", "period offset must be finite");
        MonotoneFunction f;
        f.kind_ = Kind::sampled;
        f.zs_ = std::move(zs);
        f.hs_ = std::move(hs);
        f.offset_ = offset;
        f.zs_.front() = 0.0;
        f.zs_.back() = two_pi;
        f.build_tangents();
        return f;
    }

    // Text format: header line "offset=<real>", then one "z,h" pair per line.
    static MonotoneFunction from_stream(std::istream& in) {
        std::string line;
        if (!std::getline(in, line) || line.rfind("offset=", 0) != 0)
            throw error("invalid-family", "sampled-h file must start with offset=<real>");
        double offset = 0.0;
        try {
            offset = std::stod(line.substr(7));
        } catch (const std::exception&) {
            throw error("invalid-family", "unparsable offset header");
        }
        std::vector<double> zs, hs;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            double z = 0.0, h = 0.0;
            char comma = 0;
            if (!(row >> z >> comma >> h) || comma != ',')
                throw error("invalid-family", "expected 'z,h' pair: " + line);
            zs.push_back(z);
            hs.push_back(h);
        }
        return sampled(std::move(zs), std::move(hs), offset);
    }

    static MonotoneFunction from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw error("invalid-family", "cannot open sampled-h file " + path);
        return from_stream(in);
    }

    Kind kind() const { return kind_; }
    int slope_int() const { return slope_; }
    double amplitude() const { return amplitude_; }
    int frequency() const { return frequency_; }

    // Declared h(2*pi) - h(0), used for the periodic extension.
    double offset() const { return offset_; }

    double value(double z) const {
        if (kind_ == Kind::parametric)
            return slope_ * z + amplitude_ * std::sin(frequency_ * z);
        long long k = period_index(z);
        return table_value(z - two_pi * static_cast<double>(k)) +
               offset_ * static_cast<double>(k);
    }

    double slope_at(double z) const {
        if (kind_ == Kind::parametric)
            return slope_ + amplitude_ * frequency_ * std::cos(frequency_ * z);
        long long k = period_index(z);
        return table_slope(z - two_pi * static_cast<double>(k));
    }

    // Inverse of the extended function. Newton with bisection fallback for the
    // closed form; monotone bisection to 1e-12 for tables.
    double inverse(double y) const {
        if (offset_ <= 0.0)
            throw error("range", "non-positive period offset has no extended inverse");
        const double h0 = kind_ == Kind::parametric ? 0.0 : hs_.front();
        long long k = static_cast<long long>(std::floor((y - h0) / offset_));
        double y0 = y - offset_ * static_cast<double>(k);
        if (y0 < h0) {
            --k;
            y0 += offset_;
        }
        if (y0 >= h0 + offset_) {
            ++k;
            y0 -= offset_;
        }
        double z0 = kind_ == Kind::parametric ? parametric_inverse(y0) : table_inverse(y0);
        return z0 + two_pi * static_cast<double>(k);
    }

    // Strict monotonicity of the base period (pointwise h' > 0).
    bool strictly_monotone() const {
        if (kind_ == Kind::parametric)
            return amplitude_ * frequency_ < static_cast<double>(slope_);
        for (int i = 0; i < 4096; ++i)
            if (table_slope(two_pi * i / 4096.0) <= 0.0) return false;
        return true;
    }

    // Whether the declared offset matches the table span (always true for the
    // closed form). Mismatched tables evaluate but are flagged.
    bool extension_consistent() const {
        if (kind_ == Kind::parametric) return true;
        return std::abs(offset_ - (hs_.back() - hs_.front())) <= 1e-9;
    }

private:
    MonotoneFunction() = default;

    long long period_index(double z) const {
        long long k = static_cast<long long>(std::floor(z / two_pi));
        double base = z - two_pi * static_cast<double>(k);
        if (base >= two_pi) ++k;
        if (base < 0.0) --k;
        return k;
    }

    // Fritsch-Carlson tangents keep the cubic interpolant monotone.
    void build_tangents() {
        const std::size_t n = zs_.size();
        std::vector<double> sec(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            sec[i] = (hs_[i + 1] - hs_[i]) / (zs_[i + 1] - zs_[i]);
        tangents_.assign(n, 0.0);
        tangents_.front() = sec.front();
        tangents_.back() = sec.back();
        for (std::size_t i = 1; i + 1 < n; ++i) tangents_[i] = 0.5 * (sec[i - 1] + sec[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double alpha = tangents_[i] / sec[i];
            double beta = tangents_[i + 1] / sec[i];
            double s = alpha * alpha + beta * beta;
            if (s > 9.0) {
                double t = 3.0 / std::sqrt(s);
                tangents_[i] = t * alpha * sec[i];
                tangents_[i + 1] = t * beta * sec[i];
            }
        }
    }

    std::size_t segment_of(double z) const {
        auto it = std::upper_bound(zs_.begin(), zs_.end(), z);
        std::size_t i = static_cast<std::size_t>(it - zs_.begin());
        if (i == 0) return 0;
        if (i >= zs_.size()) return zs_.size() - 2;
        return i - 1;
    }

    double table_value(double z) const {
        const std::size_t i = segment_of(z);
        const double w = zs_[i + 1] - zs_[i];
        const double t = (z - zs_[i]) / w;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * hs_[i] + (t3 - 2 * t2 + t) * w * tangents_[i] +
               (-2 * t3 + 3 * t2) * hs_[i + 1] + (t3 - t2) * w * tangents_[i + 1];
    }

    double table_slope(double z) const {
        const std::size_t i = segment_of(z);
        const double w = zs_[i + 1] - zs_[i];
        const double t = (z - zs_[i]) / w;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * hs_[i] + (3 * t2 - 4 * t + 1) * w * tangents_[i] +
                (-6 * t2 + 6 * t) * hs_[i + 1] + (3 * t2 - 2 * t) * w * tangents_[i + 1]) /
               w;
    }

    double parametric_inverse(double y0) const {
        if (amplitude_ == 0.0) return y0 / slope_;
        double lo = std::max(0.0, (y0 - amplitude_) / slope_);
        double hi = std::min(two_pi, (y0 + amplitude_) / slope_);
        double z = std::clamp(y0 / slope_, lo, hi);
        for (int it = 0; it < 100; ++it) {
            double f = slope_ * z + amplitude_ * std::sin(frequency_ * z) - y0;
            if (f > 0.0)
                hi = z;
            else
                lo = z;
            double d = slope_ + amplitude_ * frequency_ * std::cos(frequency_ * z);
            double zn = d > 0.0 ? z - f / d : 0.5 * (lo + hi);
            if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
            if (std::abs(zn - z) < 1e-15 && std::abs(f) < 1e-13) return zn;
            z = zn;
        }
        return z;
    }

    double table_inverse(double y0) const {
        const double span = hs_.back() - hs_.front();
        if (y0 > hs_.front() + span + 1e-12)
            throw error("range", "value falls in the unrepresentable extension gap");
        double lo = 0.0, hi = two_pi;
        while (hi - lo > 1e-12) {
            double mid = 0.5 * (lo + hi);
            if (table_value(mid) < y0)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    Kind kind_ = Kind::parametric;
    int slope_ = 1;
    double amplitude_ = 0.0;
    int frequency_ = 1;
    double offset_ = two_pi;
    std::vector<double> zs_, hs_, tangents_;
};

// One of the two contact families: Linear(n) on T^3 with angle profile n*z,
// or Giroux(h, n, A) on the bundle Y_A with profile h(z). Both are evaluated
// through the common profile H, so Giroux with eps = 0 and A = I reproduces
// Linear(n) exactly.
class ContactFamily {
public:
    static ContactFamily linear(int n) {
        if (n < 1) throw error("invalid-family", "linear family needs n >= 1");
        ContactFamily f;
        f.linear_ = true;
        f.n_ = n;
        f.h_ = MonotoneFunction::parametric(n, 0.0, 1);
        f.A_ = GluingMatrix::identity();
        return f;
    }

    static ContactFamily giroux(MonotoneFunction h, int n,
                                GluingMatrix A = GluingMatrix::identity()) {
        if (n < 1) throw error("invalid-family", "pinching integer must be >= 1");
        require_unimodular(A);
        ContactFamily f;
        f.linear_ = false;
        f.n_ = n;
        f.h_ = std::move(h);
        f.A_ = A;
        return f;
    }

    bool is_linear() const { return linear_; }
    int n() const { return n_; }
    const GluingMatrix& gluing() const { return A_; }
    const MonotoneFunction& h() const { return *h_; }

    // Angle profile H(z) (n*z for Linear), extended to the cover.
    double theta(double z) const { return h_->value(z); }
    double theta_slope(double z) const { return h_->slope_at(z); }
    double theta_inverse(double y) const { return h_->inverse(y); }

    // H(z + 2*pi) - H(z): flow-parameter length of one fiber period.
    double fiber_offset() const { return h_->offset(); }

    bool monotone() const { return h_->strictly_monotone(); }

    // Pinching 2*pi*n <= offset <= 2*pi*(n+1); the right equality is admitted
    // and flagged as the same-fiber conjugate-point case.
    bool pinching_ok() const {
        const double o = fiber_offset();
        return o >= two_pi * n_ - 1e-9 && o <= two_pi * (n_ + 1) + 1e-9;
    }
    bool pinching_equality_case() const {
        return std::abs(fiber_offset() - two_pi * (n_ + 1)) <= 1e-9;
    }

    std::string describe() const {
        if (linear_) return "linear:" + std::to_string(n_);
        std::string s = "giroux:n=" + std::to_string(n_);
        if (h_->kind() == MonotoneFunction::Kind::parametric)
            s += ",slope=" + std::to_string(h_->slope_int()) +
                 ",eps=" + std::to_string(h_->amplitude()) +
                 ",k=" + std::to_string(h_->frequency());
        else
            s += ",sampled";
        return s;
    }

private:
    ContactFamily() = default;

    bool linear_ = true;
    int n_ = 1;
    std::optional<MonotoneFunction> h_;
    GluingMatrix A_;
};

// ---------------------------------------------------------------------------
// Frame evaluation. alpha = cos(H) dx + sin(H) dy; xi is its Reeb field;
// v = (1/H') d/dz spans ker(alpha) transversally to xi; beta = d(alpha)(v, .).

inline Covec3 alpha_raw(const ContactFamily& f, const Lift& q) {
    const double t = f.theta(q.z);
    return {std::cos(t), std::sin(t), 0.0};
}

inline Vec3 reeb_raw(const ContactFamily& f, const Lift& q) {
    const double t = f.theta(q.z);
    return {std::cos(t), std::sin(t), 0.0};
}

inline Vec3 v_raw(const ContactFamily& f, const Lift& q) {
    const double d = f.theta_slope(q.z);
    if (std::abs(d) < 1e-12)
        throw error("degenerate-derivative", "h' vanishes at z = " + std::to_string(q.z));
    return {0.0, 0.0, 1.0 / d};
}

inline Covec3 beta_raw(const ContactFamily& f, const Lift& q) {
    const double t = f.theta(q.z);
    return {-std::sin(t), std::cos(t), 0.0};
}

inline TwoForm d_alpha_raw(const ContactFamily& f, const Lift& q) {
    const double t = f.theta(q.z);
    const double d = f.theta_slope(q.z);
    return {0.0, d * std::sin(t), -d * std::cos(t)};
}

inline TwoForm d_beta_raw(const ContactFamily& f, const Lift& q) {
    const double t = f.theta(q.z);
    const double d = f.theta_slope(q.z);
    return {0.0, d * std::cos(t), d * std::sin(t)};
}

inline Covec3 alpha_at(const ContactFamily& f, const TorusPoint& q) { return alpha_raw(f, q.lift()); }
inline Vec3 reeb_at(const ContactFamily& f, const TorusPoint& q) { return reeb_raw(f, q.lift()); }
inline Vec3 v_at(const ContactFamily& f, const TorusPoint& q) { return v_raw(f, q.lift()); }
inline Covec3 beta_at(const ContactFamily& f, const TorusPoint& q) { return beta_raw(f, q.lift()); }
inline TwoForm d_alpha_at(const ContactFamily& f, const TorusPoint& q) { return d_alpha_raw(f, q.lift()); }
inline TwoForm d_beta_at(const ContactFamily& f, const TorusPoint& q) { return d_beta_raw(f, q.lift()); }

// [xi, v] = sin(H) d/dx - cos(H) d/dy for both families.
inline Vec3 bracket_xi_v_at(const ContactFamily& f, const TorusPoint& q) {
    const double t = f.theta(q.z);
    return {std::sin(t), -std::cos(t), 0.0};
}

// Reeb field of beta; with tau = mu_bar = 0 it is -[xi, v].
inline Vec3 w_at(const ContactFamily& f, const TorusPoint& q) {
    const double t = f.theta(q.z);
    return {-std::sin(t), std::cos(t), 0.0};
}

using FieldEvaluator = std::function<Vec3(const Lift&)>;

inline FieldEvaluator reeb_field(const ContactFamily& f) {
    return [f](const Lift& q) { return reeb_raw(f, q); };
}
inline FieldEvaluator v_field(const ContactFamily& f) {
    return [f](const Lift& q) { return v_raw(f, q); };
}

// Central-difference Lie bracket [a, b] = D_a b - D_b a, O(step^2).
inline Vec3 lie_bracket_fd(const FieldEvaluator& a, const FieldEvaluator& b, const Lift& q,
                           double step = 1e-5) {
    if (!(step > 0.0) || step > 1e-2)
        throw std::invalid_argument("lie_bracket_fd: step must lie in (0, 1e-2]");
    const Vec3 aq = a(q);
    const Vec3 bq = b(q);
    const Vec3 da_b = (b(q.shifted(aq, step)) - b(q.shifted(aq, -step))) * (0.5 / step);
    const Vec3 db_a = (a(q.shifted(bq, step)) - a(q.shifted(bq, -step))) * (0.5 / step);
    return da_b - db_a;
}

inline Vec3 lie_bracket_fd(const FieldEvaluator& a, const FieldEvaluator& b,
                           const TorusPoint& q, double step = 1e-5) {
    return lie_bracket_fd(a, b, q.lift(), step);
}

// Full frame at one point; tau and mu_bar are computed by finite differences
// and carried for reporting.
struct FrameSample {
    TorusPoint point;
    Covec3 alpha, beta;
    Vec3 xi, v, bracket_xi_v, w;
    double tau = 0.0;
    double mu_bar = 0.0;
};

inline FrameSample frame_at(const ContactFamily& f, const TorusPoint& q, double fd_step = 1e-5) {
    FrameSample s;
    s.point = q;
    s.alpha = alpha_at(f, q);
    s.beta = beta_at(f, q);
    s.xi = reeb_at(f, q);
    s.v = v_at(f, q);
    s.bracket_xi_v = bracket_xi_v_at(f, q);
    s.w = w_at(f, q);

    auto xi_f = reeb_field(f);
    auto v_f = v_field(f);
    FieldEvaluator inner = [xi_f, v_f, fd_step](const Lift& p) {
        return lie_bracket_fd(xi_f, v_f, p, fd_step);
    };
    // [xi, [xi, v]] = -tau v; v has only a z-component here.
    const Vec3 outer = lie_bracket_fd(xi_f, inner, q.lift(), fd_step);
    s.tau = -outer.z / s.v.z;
    const Vec3 vvb = lie_bracket_fd(v_f, inner, q.lift(), fd_step);
    s.mu_bar = d_alpha_at(f, q)(s.v, vvb);
    return s;
}

// ---------------------------------------------------------------------------
// Structure verification.

struct StructureReport {
    int grid = 0;
    double reeb_normalization = 0.0;         // |alpha(xi) - 1|
    double reeb_in_kernel_of_dalpha = 0.0;   // |d(alpha)(xi, .)|
    double v_in_kernel = 0.0;                // |alpha(v)|
    double volume_equality = 0.0;            // |coef(alpha^d(alpha)) - coef(beta^d(beta))|
    double pairing = 0.0;                    // |d(alpha)(v, [xi,v]) + 1|
    double tau_max = 0.0;
    double mu_bar_max = 0.0;
    double tol_closed = 1e-9;
    double tol_fd = 1e-6;
    bool monotone = true;
    bool pinching_ok = true;
    bool pinching_equality = false;
    bool pass = false;

    void finalize() {
        pass = monotone && pinching_ok && reeb_normalization < tol_closed &&
               reeb_in_kernel_of_dalpha < tol_closed && v_in_kernel < tol_closed &&
               volume_equality < tol_closed && pairing < tol_fd && tau_max < tol_fd &&
               mu_bar_max < tol_fd;
    }
};

// Coefficient of a 1-form wedge 2-form on dx^dy^dz.
inline double wedge_coefficient(const Covec3& a, const TwoForm& F) {
    return a.x * F.yz - a.y * F.xz + a.z * F.xy;
}

inline StructureReport verify_structure(const ContactFamily& f, int grid_per_axis,
                                        double fd_step = 1e-5, double tol_fd = 1e-6) {
    if (grid_per_axis < 2)
        throw std::invalid_argument("verify_structure: grid_per_axis must be >= 2");
    if (!f.monotone())
        throw error("invalid-family", "profile h is not strictly increasing");

    StructureReport r;
    r.grid = grid_per_axis;
    r.tol_fd = tol_fd;
    r.monotone = true;
    r.pinching_ok = f.pinching_ok();
    r.pinching_equality = f.pinching_equality_case();

    auto xi_f = reeb_field(f);
    auto v_f = v_field(f);
    for (int i = 0; i < grid_per_axis; ++i)
        for (int j = 0; j < grid_per_axis; ++j)
            for (int k = 0; k < grid_per_axis; ++k) {
                const TorusPoint q{two_pi * i / grid_per_axis, two_pi * j / grid_per_axis,
                                   two_pi * k / grid_per_axis};
                const Covec3 al = alpha_at(f, q);
                const Covec3 be = beta_at(f, q);
                const Vec3 xi = reeb_at(f, q);
                const Vec3 v = v_at(f, q);
                const TwoForm da = d_alpha_at(f, q);
                const TwoForm db = d_beta_at(f, q);

                r.reeb_normalization = std::max(r.reeb_normalization, std::abs(al(xi) - 1.0));
                r.reeb_in_kernel_of_dalpha =
                    std::max(r.reeb_in_kernel_of_dalpha, da.contract(xi).norm_inf());
                r.v_in_kernel = std::max(r.v_in_kernel, std::abs(al(v)));
                r.volume_equality = std::max(
                    r.volume_equality,
                    std::abs(wedge_coefficient(al, da) - wedge_coefficient(be, db)));

                const Vec3 br = lie_bracket_fd(xi_f, v_f, q, fd_step);
                r.pairing = std::max(r.pairing, std::abs(da(v, br) + 1.0));
                FieldEvaluator inner = [xi_f, v_f, fd_step](const Lift& p) {
                    return lie_bracket_fd(xi_f, v_f, p, fd_step);
                };
                r.tau_max =
                    std::max(r.tau_max, lie_bracket_fd(xi_f, inner, q.lift(), fd_step).norm_inf());
                const Vec3 vvb = lie_bracket_fd(v_f, inner, q.lift(), fd_step);
                r.mu_bar_max = std::max(r.mu_bar_max, std::abs(da(v, vvb)));
            }
    r.finalize();
    return r;
}

struct InvarianceReport {
    bool invariant = false;
    double max_residual = 0.0;
};

// Samples the deck transformation (x, y, z) -> (A(x, y), z + 2*pi) and reports
// the maximum pullback residual |f*alpha - alpha| componentwise.
inline InvarianceReport check_invariance(const ContactFamily& f, int z_samples = 256) {
    if (f.is_linear())
        throw std::invalid_argument("check_invariance: expects the Giroux variant");
    const GluingMatrix& A = f.gluing();
    InvarianceReport r;
    for (int k = 0; k < z_samples; ++k) {
        const double z = two_pi * k / z_samples;
        const double t1 = f.theta(z + two_pi);
        const double t0 = f.theta(z);
        // Pullback through d(deck) = diag(A, 1).
        const double px = std::cos(t1) * A.a + std::sin(t1) * A.c;
        const double py = std::cos(t1) * A.b + std::sin(t1) * A.d;
        r.max_residual = std::max(r.max_residual,
                                  std::max(std::abs(px - std::cos(t0)), std::abs(py - std::sin(t0))));
    }
    r.invariant = r.max_residual < 1e-9;
    return r;
}

}  // namespace rch
