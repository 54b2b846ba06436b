#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rch/error.hpp"
#include "rch/infinity.hpp"
#include "rch/manifold.hpp"
#include "rch/orbits.hpp"

namespace rch {

// Arbitrary-precision integers: unimodular reductions can blow up
// intermediate entries even on small matrices.
using BigInt = boost::multiprecision::cpp_int;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, BigInt(0)) {}

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    BigInt& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const BigInt& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool is_zero() const {
        for (const BigInt& v : data_)
            if (v != 0) return false;
        return true;
    }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix product: shape mismatch");
        IntMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const BigInt& a = at(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, j) += a * o.at(k, j);
            }
        return r;
    }

    void swap_rows(std::size_t i, std::size_t j) {
        for (std::size_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
    }
    // row_i += q * row_j
    void add_row(std::size_t i, std::size_t j, const BigInt& q) {
        for (std::size_t c = 0; c < cols_; ++c) at(i, c) += q * at(j, c);
    }
    // col_i += q * col_j
    void add_col(std::size_t i, std::size_t j, const BigInt& q) {
        for (std::size_t r = 0; r < rows_; ++r) at(r, i) += q * at(r, j);
    }
    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BigInt> data_;
};

// Exact determinant by fraction-free (Bareiss) elimination.
inline BigInt determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: square matrix only");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a.at(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return sign > 0 ? a.at(n - 1, n - 1) : -a.at(n - 1, n - 1);
}

struct SmithForm {
    IntMatrix u, s, v;  // u * m * v = s

    std::vector<BigInt> invariant_factors() const {
        std::vector<BigInt> d;
        const std::size_t n = std::min(s.rows(), s.cols());
        for (std::size_t i = 0; i < n; ++i)
            if (s.at(i, i) != 0) d.push_back(s.at(i, i));
        return d;
    }
};

namespace detail {

inline BigInt big_abs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

// Smallest nonzero entry of the trailing submatrix, by absolute value.
inline bool find_pivot(const IntMatrix& s, std::size_t t, std::size_t& pi, std::size_t& pj) {
    bool found = false;
    BigInt best = 0;
    for (std::size_t i = t; i < s.rows(); ++i)
        for (std::size_t j = t; j < s.cols(); ++j) {
            if (s.at(i, j) == 0) continue;
            const BigInt a = big_abs(s.at(i, j));
            if (!found || a < best) {
                best = a;
                pi = i;
                pj = j;
                found = true;
            }
        }
    return found;
}

}  // namespace detail

// Diagonalization S = U M V with U, V unimodular, S diagonal with
// nonnegative entries dividing in order.
inline SmithForm smith_normal_form(const IntMatrix& m) {
    SmithForm f;
    f.s = m;
    f.u = IntMatrix::identity(m.rows());
    f.v = IntMatrix::identity(m.cols());
    IntMatrix& s = f.s;

    const std::size_t nmin = std::min(m.rows(), m.cols());
    for (std::size_t t = 0; t < nmin; ++t) {
        std::size_t pi = t, pj = t;
        if (!detail::find_pivot(s, t, pi, pj)) break;
        if (pi != t) {
            s.swap_rows(t, pi);
            f.u.swap_rows(t, pi);
        }
        if (pj != t) {
            s.swap_cols(t, pj);
            f.v.swap_cols(t, pj);
        }

        for (bool clean = false; !clean;) {
            clean = true;
            for (std::size_t i = t + 1; i < s.rows(); ++i) {
                if (s.at(i, t) == 0) continue;
                const BigInt q = s.at(i, t) / s.at(t, t);
                if (q != 0) {
                    s.add_row(i, t, -q);
                    f.u.add_row(i, t, -q);
                }
                if (s.at(i, t) != 0) {  // remainder becomes the smaller pivot
                    s.swap_rows(t, i);
                    f.u.swap_rows(t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < s.cols(); ++j) {
                if (s.at(t, j) == 0) continue;
                const BigInt q = s.at(t, j) / s.at(t, t);
                if (q != 0) {
                    s.add_col(j, t, -q);
                    f.v.add_col(j, t, -q);
                }
                if (s.at(t, j) != 0) {
                    s.swap_cols(t, j);
                    f.v.swap_cols(t, j);
                    clean = false;
                }
            }
        }
    }

    // Enforce the divisibility chain d_t | d_{t+1}.
    for (bool settled = false; !settled;) {
        settled = true;
        for (std::size_t t = 0; t + 1 < nmin; ++t) {
            const BigInt &a = s.at(t, t), &b = s.at(t + 1, t + 1);
            if (a == 0 && b != 0) {
                s.swap_rows(t, t + 1);
                f.u.swap_rows(t, t + 1);
                s.swap_cols(t, t + 1);
                f.v.swap_cols(t, t + 1);
                settled = false;
                continue;
            }
            if (a != 0 && b % a != 0) {
                // Fold the pair into gcd/lcm via one column mix and a cleanup.
                s.add_col(t, t + 1, 1);
                f.v.add_col(t, t + 1, 1);
                for (bool clean = false; !clean;) {
                    clean = true;
                    if (s.at(t + 1, t) != 0) {
                        const BigInt q = s.at(t + 1, t) / s.at(t, t);
                        if (q != 0) {
                            s.add_row(t + 1, t, -q);
                            f.u.add_row(t + 1, t, -q);
                        }
                        if (s.at(t + 1, t) != 0) {
                            s.swap_rows(t, t + 1);
                            f.u.swap_rows(t, t + 1);
                            clean = false;
                            continue;
                        }
                    }
                    if (s.at(t, t + 1) != 0) {
                        const BigInt q = s.at(t, t + 1) / s.at(t, t);
                        if (q != 0) {
                            s.add_col(t + 1, t, -q);
                            f.v.add_col(t + 1, t, -q);
                        }
                        if (s.at(t, t + 1) != 0) {
                            s.swap_cols(t, t + 1);
                            f.v.swap_cols(t, t + 1);
                            clean = false;
                        }
                    }
                }
                settled = false;
            }
        }
    }

    for (std::size_t t = 0; t < nmin; ++t)
        if (s.at(t, t) < 0) {
            s.negate_row(t);
            f.u.negate_row(t);
        }
    return f;
}

inline std::size_t matrix_rank(const IntMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return smith_normal_form(m).invariant_factors().size();
}

// ---------------------------------------------------------------------------
// Chain complexes.

struct GeneratorInfo {
    Generator gen;
    double z_root = 0.0;
    double action = 0.0;

    bool operator==(const GeneratorInfo& o) const { return gen == o.gen; }
};

struct HomologyGroup {
    int degree = 0;
    int free_rank = 0;
    std::vector<BigInt> torsion;  // invariant factors >= 2, in divisibility order
};

// Graded integer chain complex; boundaries[k] maps degree k to k-1 and has
// shape |gens_{k-1}| x |gens_k| (boundaries[0] has zero rows).
struct ChainComplexZ {
    std::vector<std::vector<GeneratorInfo>> gens;
    std::vector<IntMatrix> boundaries;
    bool from_linear_family = false;
    int family_n = 0;
    HomotopyClass2 cls;

    int max_degree() const { return static_cast<int>(gens.size()) - 1; }

    void validate() const {
        if (gens.size() != boundaries.size())
            throw error("not-a-complex", "one boundary matrix per degree required");
        for (std::size_t k = 0; k < gens.size(); ++k) {
            const std::size_t rows = k == 0 ? 0 : gens[k - 1].size();
            if (boundaries[k].rows() != rows || boundaries[k].cols() != gens[k].size())
                throw error("not-a-complex", "boundary shape mismatch at degree " +
                                                 std::to_string(k));
            if (k >= 1 && !(boundaries[k - 1] * boundaries[k]).is_zero())
                throw error("not-a-complex",
                            "D*D != 0 at degree " + std::to_string(k));
        }
    }

    bool operator==(const ChainComplexZ& o) const {
        return gens == o.gens && boundaries == o.boundaries;
    }
};

inline std::vector<HomologyGroup> homology_of(const ChainComplexZ& c) {
    c.validate();
    std::vector<HomologyGroup> out;
    const int top = c.max_degree();
    for (int k = 0; k <= top; ++k) {
        HomologyGroup h;
        h.degree = k;
        const std::size_t nk = c.gens[k].size();
        const std::size_t rank_dk = matrix_rank(c.boundaries[k]);
        std::size_t rank_up = 0;
        if (k + 1 <= top) {
            const SmithForm snf = smith_normal_form(c.boundaries[k + 1]);
            const auto factors = snf.invariant_factors();
            rank_up = factors.size();
            for (const BigInt& d : factors)
                if (d >= 2) h.torsion.push_back(d);
        }
        h.free_rank = static_cast<int>(nk - rank_dk - rank_up);
        out.push_back(std::move(h));
    }
    return out;
}

// Complex of one (family, class): the symmetry-broken generators of the
// critical circles in degrees 0 and 1, with the certified zero boundary.
inline ChainComplexZ build_complex(const ContactFamily& f, const HomotopyClass2& g) {
    const std::vector<OrbitCircle> circles = enumerate_orbits(f, g);
    ChainComplexZ c;
    c.from_linear_family = f.is_linear();
    c.family_n = f.n();
    c.cls = g;
    c.gens.resize(2);
    std::vector<Generator> all;
    for (const OrbitCircle& circ : circles) {
        auto [mn, mx] = break_symmetry(circ);
        c.gens[0].push_back({mn, circ.z_root, circ.action});
        c.gens[1].push_back({mx, circ.z_root, circ.action});
        all.push_back(mn);
        all.push_back(mx);
    }
    const BoundarySplit cert = boundary_split_check(all, {});
    if (!cert.per_is_zero || !cert.per_squared_is_zero)
        throw error("not-a-complex", "periodic boundary failed its zero certificate");
    c.boundaries.push_back(IntMatrix(0, c.gens[0].size()));
    c.boundaries.push_back(IntMatrix(c.gens[0].size(), c.gens[1].size()));
    return c;
}

// Degree-wise integer matrices of a chain map between two complexes.
struct ChainMap {
    std::vector<IntMatrix> maps;

    bool commutes(const ChainComplexZ& src, const ChainComplexZ& tgt) const {
        const int top = std::min(src.max_degree(), tgt.max_degree());
        for (int k = 1; k <= top; ++k)
            if (!(tgt.boundaries[k] * maps[k] == maps[k - 1] * src.boundaries[k]))
                return false;
        return true;
    }
};

inline ChainMap compose(const ChainMap& outer, const ChainMap& inner) {
    ChainMap r;
    const std::size_t n = std::min(outer.maps.size(), inner.maps.size());
    for (std::size_t k = 0; k < n; ++k) r.maps.push_back(outer.maps[k] * inner.maps[k]);
    return r;
}

struct ZkQuotient {
    ChainComplexZ quotient;
    ChainMap map;  // source generator -> its orbit class
};

// Quotient by the fiber rotation z -> z + 2*pi/k. Circle j of Linear(k*p)
// maps to circle j mod p of Linear(p); the projection is a chain map and the
// quotient boundary squares to zero.
inline ZkQuotient zk_quotient(const ChainComplexZ& source, int k) {
    if (k < 1) throw std::invalid_argument("zk_quotient: k must be >= 1");
    if (!source.from_linear_family || source.family_n % k != 0)
        throw error("not-equivariant",
                    "source complex is not invariant under z -> z + 2*pi/" + std::to_string(k));
    const int n = source.family_n;
    const int p = n / k;

    // The rotation must permute the source circles.
    for (const GeneratorInfo& gi : source.gens[0]) {
        const double shifted = wrap_angle(gi.z_root + two_pi / k);
        bool hit = false;
        for (const GeneratorInfo& gj : source.gens[0])
            hit = hit || angle_distance(shifted, gj.z_root) < 1e-9;
        if (!hit)
            throw error("not-equivariant", "rotated circle misses the critical set");
    }

    ZkQuotient out;
    out.quotient = build_complex(ContactFamily::linear(p), source.cls);
    for (int deg = 0; deg <= 1; ++deg) {
        IntMatrix m(out.quotient.gens[deg].size(), source.gens[deg].size());
        for (std::size_t col = 0; col < source.gens[deg].size(); ++col) {
            const int j = source.gens[deg][col].gen.circle;
            m.at(static_cast<std::size_t>(j % p), col) = 1;
        }
        out.map.maps.push_back(std::move(m));
    }
    if (!out.map.commutes(source, out.quotient))
        throw error("not-equivariant", "projection failed to commute with boundaries");
    out.quotient.validate();
    return out;
}

struct DiagramSquare {
    std::string name;
    bool commutes = false;
};

struct DiagramReport {
    int p = 0, q = 0;
    HomotopyClass2 cls;
    std::vector<DiagramSquare> squares;
    bool all_commute = false;
};

// Commuting-diagram check: quotienting Linear(p*q) by Z_q then Z_p equals the
// direct Z_{pq} quotient, on chains and on homology, and every map commutes
// with the boundaries.
inline DiagramReport verify_diagram(int p, int q, const HomotopyClass2& g) {
    if (p < 1 || q < 1) throw std::invalid_argument("verify_diagram: p, q must be >= 1");
    DiagramReport rep;
    rep.p = p;
    rep.q = q;
    rep.cls = g;

    const ChainComplexZ c_pq = build_complex(ContactFamily::linear(p * q), g);
    const ZkQuotient via_q = zk_quotient(c_pq, q);          // -> Linear(p)
    const ZkQuotient via_p = zk_quotient(c_pq, p);          // -> Linear(q)
    const ZkQuotient q_then_p = zk_quotient(via_q.quotient, p);  // -> Linear(1)
    const ZkQuotient p_then_q = zk_quotient(via_p.quotient, q);  // -> Linear(1)
    const ZkQuotient direct = zk_quotient(c_pq, p * q);          // -> Linear(1)

    auto maps_equal = [](const ChainMap& a, const ChainMap& b) {
        if (a.maps.size() != b.maps.size()) return false;
        for (std::size_t i = 0; i < a.maps.size(); ++i)
            if (!(a.maps[i] == b.maps[i])) return false;
        return true;
    };

    rep.squares.push_back({"chain: f^p o f^q = f^{pq}",
                           maps_equal(compose(q_then_p.map, via_q.map), direct.map)});
    rep.squares.push_back({"chain: f^q o f^p = f^{pq}",
                           maps_equal(compose(p_then_q.map, via_p.map), direct.map)});
    rep.squares.push_back({"boundaries: every projection is a chain map",
                           via_q.map.commutes(c_pq, via_q.quotient) &&
                               via_p.map.commutes(c_pq, via_p.quotient) &&
                               q_then_p.map.commutes(via_q.quotient, q_then_p.quotient) &&
                               p_then_q.map.commutes(via_p.quotient, p_then_q.quotient) &&
                               direct.map.commutes(c_pq, direct.quotient)});
    rep.squares.push_back({"quotients match the directly built complexes",
                           via_q.quotient == build_complex(ContactFamily::linear(p), g) &&
                               via_p.quotient == build_complex(ContactFamily::linear(q), g) &&
                               direct.quotient == build_complex(ContactFamily::linear(1), g)});

    // With zero boundaries the homology-level maps are the chain maps.
    bool hom_ok = true;
    auto ranks = [](const ChainComplexZ& c) {
        std::vector<int> r;
        for (const HomologyGroup& h : homology_of(c)) r.push_back(h.free_rank);
        return r;
    };
    hom_ok = hom_ok && ranks(c_pq) == std::vector<int>{p * q, p * q};
    hom_ok = hom_ok && ranks(via_q.quotient) == std::vector<int>{p, p};
    hom_ok = hom_ok && ranks(via_p.quotient) == std::vector<int>{q, q};
    hom_ok = hom_ok && ranks(direct.quotient) == std::vector<int>{1, 1};
    hom_ok = hom_ok && maps_equal(compose(q_then_p.map, via_q.map),
                                  compose(p_then_q.map, via_p.map));
    rep.squares.push_back({"homology: induced squares commute with the stated ranks", hom_ok});

    rep.all_commute = true;
    for (const DiagramSquare& s : rep.squares) rep.all_commute = rep.all_commute && s.commutes;
    return rep;
}

}  // namespace rch
