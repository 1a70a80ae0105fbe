#pragma once

#include "kred/numerics.hpp"

namespace kred {

/**
 * A finite-dimensional complex inner-product space: either C^d (vectors) or
 * Hom(C^k, C^n) stored as n-by-k matrices flattened column-major. Carries the
 * Hermitian metric h(a,b) = sum a_j conj(b_j) = Tr(A B^dagger), with
 * Riemannian part g = Re h and symplectic part omega = Im h. Multiplication
 * by i is the ambient complex structure; all frame computations downstream
 * are real-linear over the realification using g.
 */
struct AmbientSpace {
    enum class Shape { vector, matrix };

    Shape shape = Shape::vector;
    int rows = 0;  // vector: dimension d; matrix: n
    int cols = 1;  // matrix: k

    static AmbientSpace vector_space(int d) {
        if (d <= 0) throw std::invalid_argument("ambient dimension must be positive");
        return {Shape::vector, d, 1};
    }

    /// Hom(C^k, C^n), n >= 1, k >= 1.
    static AmbientSpace matrix_space(int n, int k) {
        if (n <= 0 || k <= 0) throw std::invalid_argument("ambient shape must be positive");
        return {Shape::matrix, n, k};
    }

    int complex_dim() const { return rows * cols; }
    int real_dim() const { return 2 * complex_dim(); }

    void require_shape(const CVec& v) const {
        if (v.size() != complex_dim()) throw std::invalid_argument("ambient shape mismatch");
    }

    Eigen::Map<const CMat> as_matrix(const CVec& v) const {
        require_shape(v);
        return {v.data(), rows, cols};
    }

    CVec from_matrix(const CMat& m) const {
        if (m.rows() != rows || m.cols() != cols) throw std::invalid_argument("ambient shape mismatch");
        return Eigen::Map<const CVec>(m.data(), m.size());
    }

    Cplx hermitian(const CVec& a, const CVec& b) const {
        require_shape(a);
        require_shape(b);
        return hermitian_dot(a, b);
    }

    double metric(const CVec& a, const CVec& b) const { return hermitian(a, b).real(); }
    double sympl(const CVec& a, const CVec& b) const { return hermitian(a, b).imag(); }

    /// Tautological 1-form at `base` applied to `dir`: Im Tr(base dir^dagger).
    double liouville(const CVec& base, const CVec& dir) const { return sympl(base, dir); }

    CVec random_element(Rng& rng) const { return rng.gaussian_cvec(complex_dim()); }
};

enum class RetractionKind { sphere_normalize, stiefel_polar };

/// First-order retraction onto the constraint set: normalization for unit
/// spheres, the polar factor for orthonormal frames. Exact onto the set.
inline CVec retract(const AmbientSpace& amb, RetractionKind kind, const CVec& q, const CVec& v) {
    amb.require_shape(q);
    amb.require_shape(v);
    switch (kind) {
        case RetractionKind::sphere_normalize: {
            CVec w = q + v;
            const double n = real_norm(w);
            if (n < 1e-14) throw std::runtime_error("sphere retraction through the origin");
            return w / n;
        }
        case RetractionKind::stiefel_polar: {
            const CMat W = amb.as_matrix(q) + amb.as_matrix(v);
            const CMat H = W.adjoint() * W;  // k x k Hermitian positive semidefinite
            Eigen::SelfAdjointEigenSolver<CMat> eig(H);
            const auto& lam = eig.eigenvalues();
            if (lam.minCoeff() < 1e-14 * std::max(1.0, lam.maxCoeff()))
                throw std::runtime_error("stiefel retraction: normalization not invertible");
            const CMat inv_sqrt =
                eig.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().adjoint();
            return amb.from_matrix(W * inv_sqrt);
        }
    }
    throw std::invalid_argument("unknown retraction kind");
}

}  // namespace kred
