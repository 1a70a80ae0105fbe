#pragma once

#include "kred/product.hpp"

#include <numeric>
#include <optional>

namespace kred {

/// Exact rational arithmetic for the period-lattice computations. Desk scale
/// (|det| <= 12), so long long never overflows.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d = 1) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const long long g = std::gcd(std::abs(num), den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    bool is_integer() const { return den == 1; }
    bool is_zero() const { return num == 0; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
    friend Rational operator-(Rational a) { return {-a.num, a.den}; }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }

    Rational abs() const { return {std::llabs(num), den}; }
};

/// Point of Q^2 identified with a + i b in the complex parameter plane.
struct RatPoint {
    Rational a, b;

    Cplx value() const { return {a.value(), b.value()}; }
    Rational norm2() const { return a * a + b * b; }
};

/// Full-rank lattice in C with exact rational generators.
struct Lattice2D {
    RatPoint g1, g2;
    Rational covolume;  // |det[g1 g2]|

    Cplx generator1() const { return g1.value(); }
    Cplx generator2() const { return g2.value(); }

    /// Reduce z into the centered fundamental cell.
    Cplx reduce(Cplx z) const {
        const double d = g1.a.value() * g2.b.value() - g1.b.value() * g2.a.value();
        const double c1 = (z.real() * g2.b.value() - z.imag() * g2.a.value()) / d;
        const double c2 = (g1.a.value() * z.imag() - g1.b.value() * z.real()) / d;
        const double m1 = std::round(c1), m2 = std::round(c2);
        return {z.real() - m1 * g1.a.value() - m2 * g2.a.value(),
                z.imag() - m1 * g1.b.value() - m2 * g2.b.value()};
    }

    double distance_mod(Cplx z, Cplx w) const { return std::abs(reduce(z - w)); }
};

namespace detail {
inline long long floor_div(long long a, long long b) {  // b > 0
    long long q = a / b, r = a % b;
    if (r < 0) --q;
    return q;
}
inline long long nearest_int(Rational r) { return floor_div(2 * r.num + r.den, 2 * r.den); }
}  // namespace detail

/// Stabilizer lattice of the mixed action: { a+ib : A^T (a,b) in Z^2 },
/// i.e. (A^T)^{-1} Z^2, computed exactly through the adjugate and reduced to
/// a shortest-pair basis (Gauss reduction plus an exact enumeration sweep).
inline Lattice2D period_lattice(const Eigen::Matrix2i& A) {
    const long long det = static_cast<long long>(A(0, 0)) * A(1, 1) - static_cast<long long>(A(0, 1)) * A(1, 0);
    if (det == 0) throw std::invalid_argument("degenerate mixing matrix");
    // columns of (A^T)^{-1} = adj(A^T)/det
    RatPoint v1{Rational(A(1, 1), det), Rational(-A(0, 1), det)};
    RatPoint v2{Rational(-A(1, 0), det), Rational(A(0, 0), det)};

    auto dot = [](const RatPoint& x, const RatPoint& y) { return x.a * y.a + x.b * y.b; };
    for (int iter = 0; iter < 64; ++iter) {
        if (dot(v2, v2) < dot(v1, v1)) std::swap(v1, v2);
        const long long mu = detail::nearest_int(dot(v1, v2) / dot(v1, v1));
        if (mu == 0) break;
        v2.a = v2.a - Rational(mu) * v1.a;
        v2.b = v2.b - Rational(mu) * v1.b;
    }
    // exact sweep over small combinations: shortest nonzero vector, then the
    // shortest one independent of it
    RatPoint best1 = v1, best2 = v2;
    Rational n1 = dot(v1, v1), n2 = dot(v2, v2);
    for (long long m = -3; m <= 3; ++m)
        for (long long n = -3; n <= 3; ++n) {
            if (m == 0 && n == 0) continue;
            RatPoint w{v1.a * Rational(m) + v2.a * Rational(n), v1.b * Rational(m) + v2.b * Rational(n)};
            const Rational nw = dot(w, w);
            if (nw < n1) {
                best2 = best1;
                n2 = n1;
                best1 = w;
                n1 = nw;
            } else if (nw < n2) {
                const Rational indep = best1.a * w.b - best1.b * w.a;
                if (!indep.is_zero()) {
                    best2 = w;
                    n2 = nw;
                }
            }
        }
    auto canonical = [](RatPoint& v) {
        if (v.a.num < 0 || (v.a.is_zero() && v.b.num < 0)) {
            v.a = -v.a;
            v.b = -v.b;
        }
    };
    canonical(best1);
    canonical(best2);
    Lattice2D out;
    out.g1 = best1;
    out.g2 = best2;
    out.covolume = (best1.a * best2.b - best1.b * best2.a).abs();
    return out;
}

/// Exact membership of a rational parameter in the stabilizer lattice of A.
inline bool lattice_contains(const Eigen::Matrix2i& A, const RatPoint& z) {
    const Rational phi1 = Rational(A(0, 0)) * z.a + Rational(A(1, 0)) * z.b;
    const Rational phi2 = Rational(A(0, 1)) * z.a + Rational(A(1, 1)) * z.b;
    return phi1.is_integer() && phi2.is_integer();
}

/// Comparison of the computed stabilizer against the square lattices
/// (Z/2) + i(Z/2) and (Z/p) + i(Z/p) with p = |det A|. Reports containment
/// with an exact witness when it fails.
struct LatticeClaimReport {
    Lattice2D computed;
    long long p = 1;
    bool half_contained = false, half_equal = false;
    bool p_contained = false, p_equal = false;
    std::optional<RatPoint> half_witness, p_witness;
};

inline LatticeClaimReport check_paper_lattice_claim(const Eigen::Matrix2i& A) {
    LatticeClaimReport rep;
    rep.computed = period_lattice(A);
    const long long det = static_cast<long long>(A(0, 0)) * A(1, 1) - static_cast<long long>(A(0, 1)) * A(1, 0);
    rep.p = std::llabs(det);

    auto examine = [&A, &rep](long long q, bool& contained, bool& equal, std::optional<RatPoint>& witness) {
        const RatPoint e1{Rational(1, q), Rational(0)};
        const RatPoint e2{Rational(0), Rational(1, q)};
        contained = true;
        for (const RatPoint& gen : {e1, e2})
            if (!lattice_contains(A, gen)) {
                contained = false;
                if (!witness) witness = gen;
            }
        auto in_square = [q](const RatPoint& v) {
            return (v.a * Rational(q)).is_integer() && (v.b * Rational(q)).is_integer();
        };
        equal = contained && in_square(rep.computed.g1) && in_square(rep.computed.g2);
    };
    examine(2, rep.half_contained, rep.half_equal, rep.half_witness);
    examine(rep.p, rep.p_contained, rep.p_equal, rep.p_witness);
    return rep;
}

/**
 * One-parameter circle subgroup, shared by both factors of a product: a
 * weighted direction inside a torus, or a diagonal coordinate circle of U(k).
 * `element(phi)` has period 1 in phi; `generator_elem` is the algebra element
 * whose generator field is d/dphi of the induced action on points.
 */
struct CircleSpec {
    enum class Kind { torus_direction, unitary_diag };

    Kind kind = Kind::torus_direction;
    Eigen::VectorXi dir;  // torus factor weights
    int diag_index = 0;

    static CircleSpec torus_direction(Eigen::VectorXi d) {
        CircleSpec c;
        c.kind = Kind::torus_direction;
        c.dir = std::move(d);
        return c;
    }

    static CircleSpec unitary_diag(int index) {
        CircleSpec c;
        c.kind = Kind::unitary_diag;
        c.diag_index = index;
        return c;
    }

    GroupElement element(const GroupSpec& G, double phi) const {
        if (kind == Kind::torus_direction) return GroupElement::torus(phi * dir.cast<double>());
        CMat u = CMat::Identity(G.k, G.k);
        u(diag_index, diag_index) = std::polar(1.0, kTwoPi * phi);
        return GroupElement::unitary(std::move(u));
    }

    /// Algebra element with generator field d/dphi act(element(phi), q)|_0.
    /// For the unitary case the action goes through u^dagger, hence the sign.
    LieAlg generator_elem(const GroupSpec& G) const {
        if (kind == Kind::torus_direction) return LieAlg::torus(dir.cast<double>());
        CMat xi = CMat::Zero(G.k, G.k);
        xi(diag_index, diag_index) = -kTwoPi * kI;
        return LieAlg::unitary(std::move(xi));
    }
};

/**
 * Mixed C-action on a product: z = a + i b acts on factor 1 through the
 * circle parameter phi1 = A11 a + A21 b and on factor 2 through
 * phi2 = A12 a + A22 b.
 *
 * Default mixing [[1, -1], [1, 1]]: the first factor turns with a + b, the
 * second with b - a. This is the orientation that makes the orbit maps
 * holomorphic for the product structure as implemented (the variant where
 * the second factor turns with a - b is the complex conjugate
 * parameterization; it has the same orbits and the same stabilizer lattice).
 */
struct PsiAction {
    const ProductACS* acs = nullptr;
    Eigen::Matrix2i mixing;
    CircleSpec circle1, circle2;

    static Eigen::Matrix2i default_mixing() {
        Eigen::Matrix2i m;
        m << 1, -1, 1, 1;
        return m;
    }

    std::pair<double, double> phases(Cplx z) const {
        const double a = z.real(), b = z.imag();
        return {mixing(0, 0) * a + mixing(1, 0) * b, mixing(0, 1) * a + mixing(1, 1) * b};
    }

    ProductPoint apply(Cplx z, const ProductPoint& q) const {
        const auto [phi1, phi2] = phases(z);
        return {act(acs->factor1().group(), acs->factor1().ambient(), circle1.element(acs->factor1().group(), phi1), q.p1),
                act(acs->factor2().group(), acs->factor2().ambient(), circle2.element(acs->factor2().group(), phi2), q.p2)};
    }

    /// Analytic differential of the orbit map z -> psi(z, q) at the moved
    /// point, along d/da (which = 1) or d/db (which = 2).
    ProductTangent orbit_derivative(int which, const ProductPoint& at) const {
        const double w1 = mixing(which - 1, 0), w2 = mixing(which - 1, 1);
        ProductTangent out;
        out.v1 = w1 * generator(acs->factor1().group(), acs->factor1().ambient(),
                                circle1.generator_elem(acs->factor1().group()), at.p1);
        out.v2 = w2 * generator(acs->factor2().group(), acs->factor2().ambient(),
                                circle2.generator_elem(acs->factor2().group()), at.p2);
        return out;
    }

    /// d psi_z as a linear map on ambient tangents.
    ProductTangent push_tangent(Cplx z, const ProductTangent& w) const {
        const auto [phi1, phi2] = phases(z);
        return {act(acs->factor1().group(), acs->factor1().ambient(), circle1.element(acs->factor1().group(), phi1), w.v1),
                act(acs->factor2().group(), acs->factor2().ambient(), circle2.element(acs->factor2().group(), phi2), w.v2)};
    }

    Lattice2D period_lattice() const { return kred::period_lattice(mixing); }
};

/// || d psi_q(i) - J d psi_q(1) || at psi_z(q): vanishing says the orbit maps
/// are J-holomorphic curves.
inline double check_orbit_holomorphy(const PsiAction& psi, const ProductPoint& q, Cplx z) {
    const ProductPoint at = psi.apply(z, q);
    const ProductTangent u1 = psi.orbit_derivative(1, at);
    const ProductTangent u2 = psi.orbit_derivative(2, at);
    return (u2 - psi.acs->apply_J(at, u1)).norm();
}

/**
 * max_w || d psi_z (J w) - J (d psi_z w) || over sampled tangents: the
 * translations psi_z are J-holomorphic maps.
 *
 * Tangents are drawn from the horizontal spaces plus the verticals of
 * `sampling_algebra`. For an abelian structure group that algebra is the
 * whole thing and the samples fill the tangent space. When the structure
 * group is nonabelian and the circles sit in a subtorus, only the subtorus
 * verticals are translation-invariant (the rest is rotated by Ad and the
 * identity genuinely fails there), so the algebra is restricted accordingly.
 */
inline double check_translation_holomorphy(const PsiAction& psi, Cplx z, const ProductPoint& q, int samples,
                                           const std::vector<LieAlg>& sampling_algebra, Rng& rng) {
    const ProductACS& acs = *psi.acs;
    const ProductPoint moved = psi.apply(z, q);
    const Splitting &s1 = acs.split1(q.p1), &s2 = acs.split2(q.p2);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        ProductTangent w{CVec::Zero(q.p1.size()), CVec::Zero(q.p2.size())};
        w.v1 = s1.project_horizontal(rng.gaussian_cvec(q.p1.size()));
        w.v2 = s2.project_horizontal(rng.gaussian_cvec(q.p2.size()));
        for (const LieAlg& xi : sampling_algebra) {
            w.v1 += rng.gaussian() * generator(acs.factor1().group(), acs.factor1().ambient(), xi, q.p1);
            w.v2 += rng.gaussian() * generator(acs.factor2().group(), acs.factor2().ambient(), xi, q.p2);
        }
        const ProductTangent lhs = psi.push_tangent(z, acs.apply_J(q, w));
        const ProductTangent rhs = acs.apply_J(moved, psi.push_tangent(z, w));
        const double nw = std::max(w.norm(), 1e-12);
        worst = std::max(worst, (lhs - rhs).norm() / nw);
    }
    return worst;
}

/**
 * Candidate circle parameters phi (period 1) moving `from` to `to` on one
 * factor, recovered from phase ratios. Torus circles read the phase off the
 * largest-modulus coordinate of the heaviest weight class (each class gives
 * |w| candidates); the diagonal unitary circle reads it off the rotated
 * column. Throws "phase unobservable" when every acted-on coordinate
 * vanishes.
 */
inline std::vector<double> recover_circle_phase(const CircleSpec& circle, const GroupSpec& G,
                                                const AmbientSpace& amb, const CVec& from, const CVec& to) {
    std::vector<double> candidates;
    if (circle.kind == CircleSpec::Kind::unitary_diag) {
        const auto A = amb.as_matrix(from), B = amb.as_matrix(to);
        const Cplx overlap = hermitian_dot(B.col(circle.diag_index), A.col(circle.diag_index));
        if (std::abs(overlap) < 1e-9) throw std::runtime_error("phase unobservable");
        // column turns with exp(-2 pi i phi)
        double phi = -std::arg(overlap) / kTwoPi;
        phi -= std::floor(phi);
        candidates.push_back(phi);
        return candidates;
    }
    detail::require_torus(G, amb);
    int best_j = -1;
    double best_mod = 0.0;
    for (int j = 0; j < from.size(); ++j) {
        const int w = circle.dir.dot(G.weights.row(j).transpose());
        if (w == 0) continue;
        const double mod = std::min(std::abs(from[j]), std::abs(to[j]));
        if (mod > best_mod) {
            best_mod = mod;
            best_j = j;
        }
    }
    if (best_j < 0 || best_mod < 1e-9) throw std::runtime_error("phase unobservable");
    const int w = circle.dir.dot(G.weights.row(best_j).transpose());
    const double theta = std::arg(to[best_j] / from[best_j]) / kTwoPi;  // = w * phi mod 1
    for (int m = 0; m < std::abs(w); ++m) {
        double phi = (theta + m) / w;
        phi -= std::floor(phi);
        candidates.push_back(phi);
    }
    return candidates;
}

}  // namespace kred
