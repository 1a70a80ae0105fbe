#pragma once

#include "kred/ambient.hpp"

namespace kred {

/**
 * Acting symmetry group: a weighted torus T^p (integer weight matrix, one row
 * per ambient complex coordinate, one column per torus factor) or the unitary
 * group U(k) acting on Hom(C^k, C^n) by A . u = A u^dagger.
 *
 * Conventions, fixed once and used everywhere:
 *  - torus action:   z_j -> exp(2 pi i <W_j, theta>) z_j
 *  - unitary action: A -> A u^dagger (a left action)
 *  - infinitesimal generator: torus  gen(theta)_j = 2 pi i <W_j, theta> z_j,
 *                             unitary gen(xi) = A xi  (i.e. the flow
 *                             t -> A exp(t xi), which is act(exp(-t xi), A)).
 */
struct GroupSpec {
    enum class Kind { torus, unitary };

    Kind kind = Kind::torus;
    Eigen::MatrixXi weights;  // torus: complex_dim x p
    int k = 0;                // unitary rank

    static GroupSpec torus(Eigen::MatrixXi W) {
        if (W.cols() <= 0 || W.rows() <= 0) throw std::invalid_argument("empty torus weight matrix");
        GroupSpec g;
        g.kind = Kind::torus;
        g.weights = std::move(W);
        return g;
    }

    static GroupSpec unitary(int k) {
        if (k <= 0) throw std::invalid_argument("unitary rank must be positive");
        GroupSpec g;
        g.kind = Kind::unitary;
        g.k = k;
        return g;
    }

    /// Real dimension of the Lie algebra: p for T^p, k^2 for u(k).
    int dim() const { return kind == Kind::torus ? static_cast<int>(weights.cols()) : k * k; }
};

/// Lie algebra element: real p-vector for tori, skew-Hermitian k x k matrix
/// for u(k). Only the slot matching the group kind is meaningful.
struct LieAlg {
    RVec theta;
    CMat xi;

    static LieAlg torus(RVec t) {
        LieAlg a;
        a.theta = std::move(t);
        return a;
    }
    static LieAlg unitary(CMat m) {
        LieAlg a;
        a.xi = std::move(m);
        return a;
    }
};

struct GroupElement {
    RVec theta;  // torus: angles, stored unreduced (compare mod 1 only)
    CMat u;      // unitary matrix

    static GroupElement torus(RVec t) {
        GroupElement g;
        g.theta = std::move(t);
        return g;
    }
    static GroupElement unitary(CMat m) {
        GroupElement g;
        g.u = std::move(m);
        return g;
    }
};

namespace detail {
inline void require_torus(const GroupSpec& G, const AmbientSpace& amb) {
    if (G.weights.rows() != amb.complex_dim())
        throw std::invalid_argument("torus weight rows must match ambient coordinates");
}
inline void require_unitary(const GroupSpec& G, const AmbientSpace& amb) {
    if (amb.shape != AmbientSpace::Shape::matrix || amb.cols != G.k)
        throw std::invalid_argument("unitary group acts on Hom(C^k, C^n) only");
}
}  // namespace detail

inline CVec act(const GroupSpec& G, const AmbientSpace& amb, const GroupElement& g, const CVec& q) {
    amb.require_shape(q);
    if (G.kind == GroupSpec::Kind::torus) {
        detail::require_torus(G, amb);
        if (g.theta.size() != G.weights.cols()) throw std::invalid_argument("group element shape mismatch");
        CVec out(q.size());
        for (int j = 0; j < q.size(); ++j) {
            const double phase = kTwoPi * G.weights.row(j).cast<double>().dot(g.theta);
            out[j] = std::polar(1.0, phase) * q[j];
        }
        return out;
    }
    detail::require_unitary(G, amb);
    if (g.u.rows() != G.k || g.u.cols() != G.k) throw std::invalid_argument("group element shape mismatch");
    if ((g.u.adjoint() * g.u - CMat::Identity(G.k, G.k)).norm() > 1e-10)
        throw std::invalid_argument("group element is not unitary");
    return amb.from_matrix(amb.as_matrix(q) * g.u.adjoint());
}

inline CVec generator(const GroupSpec& G, const AmbientSpace& amb, const LieAlg& xi, const CVec& q) {
    amb.require_shape(q);
    if (G.kind == GroupSpec::Kind::torus) {
        detail::require_torus(G, amb);
        if (xi.theta.size() != G.weights.cols()) throw std::invalid_argument("algebra element shape mismatch");
        CVec out(q.size());
        for (int j = 0; j < q.size(); ++j)
            out[j] = kTwoPi * kI * G.weights.row(j).cast<double>().dot(xi.theta) * q[j];
        return out;
    }
    detail::require_unitary(G, amb);
    if (xi.xi.rows() != G.k || xi.xi.cols() != G.k) throw std::invalid_argument("algebra element shape mismatch");
    return amb.from_matrix(amb.as_matrix(q) * xi.xi);
}

inline LieAlg bracket(const GroupSpec& G, const LieAlg& a, const LieAlg& b) {
    if (G.kind == GroupSpec::Kind::torus) return LieAlg::torus(RVec::Zero(G.weights.cols()));
    return LieAlg::unitary(a.xi * b.xi - b.xi * a.xi);
}

/// Coadjoint motion of a dual-algebra element, identified with matrices:
/// m -> u m u^dagger. Trivial (identity) for tori.
inline CMat adjoint_orbit_map(const GroupSpec& G, const GroupElement& g, const CMat& m) {
    if (G.kind == GroupSpec::Kind::torus) return m;
    return g.u * m * g.u.adjoint();
}

/// exp for u(k) through the eigendecomposition of the Hermitian matrix i*xi;
/// the result is unitary to machine precision. Tori exponentiate trivially.
inline GroupElement exp_element(const GroupSpec& G, const LieAlg& xi) {
    if (G.kind == GroupSpec::Kind::torus) return GroupElement::torus(xi.theta);
    const CMat H = kI * xi.xi;  // Hermitian when xi is skew-Hermitian
    Eigen::SelfAdjointEigenSolver<CMat> eig(H);
    CVec phases(G.k);
    for (int j = 0; j < G.k; ++j) phases[j] = std::polar(1.0, -eig.eigenvalues()[j]);
    return GroupElement::unitary(eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint());
}

/// Fixed algebra basis. Torus: standard basis of R^p. u(k): the diagonal
/// imaginary units first, then for each pair a<b (lexicographic) the real
/// rotation E_ab - E_ba followed by the imaginary reflection i(E_ab + E_ba).
inline std::vector<LieAlg> algebra_basis(const GroupSpec& G) {
    std::vector<LieAlg> basis;
    if (G.kind == GroupSpec::Kind::torus) {
        const int p = static_cast<int>(G.weights.cols());
        for (int a = 0; a < p; ++a) {
            RVec e = RVec::Zero(p);
            e[a] = 1.0;
            basis.push_back(LieAlg::torus(std::move(e)));
        }
        return basis;
    }
    const int k = G.k;
    for (int a = 0; a < k; ++a) {
        CMat m = CMat::Zero(k, k);
        m(a, a) = kI;
        basis.push_back(LieAlg::unitary(std::move(m)));
    }
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            CMat re = CMat::Zero(k, k);
            re(a, b) = 1.0;
            re(b, a) = -1.0;
            basis.push_back(LieAlg::unitary(std::move(re)));
            CMat im = CMat::Zero(k, k);
            im(a, b) = kI;
            im(b, a) = kI;
            basis.push_back(LieAlg::unitary(std::move(im)));
        }
    return basis;
}

inline LieAlg algebra_from_coords(const GroupSpec& G, const RVec& coeff) {
    const auto basis = algebra_basis(G);
    if (coeff.size() != static_cast<Eigen::Index>(basis.size()))
        throw std::invalid_argument("algebra coefficient size mismatch");
    if (G.kind == GroupSpec::Kind::torus) return LieAlg::torus(coeff);
    CMat m = CMat::Zero(G.k, G.k);
    for (std::size_t j = 0; j < basis.size(); ++j) m += coeff[static_cast<Eigen::Index>(j)] * basis[j].xi;
    return LieAlg::unitary(std::move(m));
}

inline LieAlg random_algebra(const GroupSpec& G, Rng& rng) {
    return algebra_from_coords(G, rng.gaussian_rvec(G.dim()));
}

inline GroupElement random_element(const GroupSpec& G, Rng& rng) {
    if (G.kind == GroupSpec::Kind::torus) return GroupElement::torus(rng.gaussian_rvec(G.dim()));
    return exp_element(G, random_algebra(G, rng));
}

inline GroupElement compose(const GroupSpec& G, const GroupElement& g2, const GroupElement& g1) {
    if (G.kind == GroupSpec::Kind::torus) return GroupElement::torus(g2.theta + g1.theta);
    return GroupElement::unitary(g2.u * g1.u);
}

}  // namespace kred
