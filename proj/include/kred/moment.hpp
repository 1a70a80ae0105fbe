#pragma once

#include "kred/group.hpp"

#include <Eigen/Cholesky>

namespace kred {

/// Element of the dual Lie algebra: real p-vector for tori (identified with
/// the algebra), skew-Hermitian k x k matrix for u(k)* (Frobenius pairing).
struct DualElem {
    RVec t;
    CMat m;

    static DualElem torus(RVec v) {
        DualElem d;
        d.t = std::move(v);
        return d;
    }
    static DualElem unitary(CMat mm) {
        DualElem d;
        d.m = std::move(mm);
        return d;
    }

    double norm() const { return t.size() > 0 ? t.norm() : m.norm(); }
};

inline DualElem operator-(const DualElem& a, const DualElem& b) {
    if (a.t.size() > 0) return DualElem::torus(a.t - b.t);
    return DualElem::unitary(a.m - b.m);
}

/**
 * Momentum map of the group action on the ambient space.
 *   torus:   mu_a(z) = pi sum_j W_ja |z_j|^2 + c0_a
 *   unitary: mu(A)   = i (A^dagger A)
 * Both are Hamiltonian for the generators above in the sense that
 * ker(d mu_q) is exactly the g-orthogonal complement of i . (vertical space),
 * which is what makes the horizontal spaces complex-invariant.
 */
struct MomentMap {
    GroupSpec group;
    AmbientSpace ambient;
    RVec c0;  // torus offset; empty means zero

    static MomentMap torus(GroupSpec g, AmbientSpace amb, RVec offset) {
        detail::require_torus(g, amb);
        if (offset.size() != g.weights.cols()) throw std::invalid_argument("offset size mismatch");
        return {std::move(g), amb, std::move(offset)};
    }

    static MomentMap unitary(GroupSpec g, AmbientSpace amb) {
        detail::require_unitary(g, amb);
        return {std::move(g), amb, RVec()};
    }

    DualElem eval(const CVec& q) const {
        ambient.require_shape(q);
        if (group.kind == GroupSpec::Kind::torus) {
            const int p = static_cast<int>(group.weights.cols());
            RVec out = c0;
            for (int a = 0; a < p; ++a)
                for (int j = 0; j < q.size(); ++j)
                    out[a] += kPi * group.weights(j, a) * std::norm(q[j]);
            return DualElem::torus(std::move(out));
        }
        const auto A = ambient.as_matrix(q);
        return DualElem::unitary(kI * (A.adjoint() * A));
    }

    /// Number of real constraint coordinates cut by the level equation.
    int codim() const { return group.dim(); }

    /// Realified differential: codim() rows, 2m columns, acting on [Re; Im].
    RMat differential_real(const CVec& q) const {
        const int m = ambient.complex_dim();
        RMat D(codim(), 2 * m);
        if (group.kind == GroupSpec::Kind::torus) {
            const int p = static_cast<int>(group.weights.cols());
            for (int a = 0; a < p; ++a)
                for (int j = 0; j < m; ++j) {
                    D(a, j) = 2.0 * kPi * group.weights(j, a) * q[j].real();
                    D(a, m + j) = 2.0 * kPi * group.weights(j, a) * q[j].imag();
                }
            return D;
        }
        const int k = group.k;
        const auto A = ambient.as_matrix(q);
        // d mu(Z) = i (Z^dagger A + A^dagger Z); columns are the real basis directions.
        for (int c = 0; c < 2 * m; ++c) {
            CVec z = CVec::Zero(m);
            if (c < m)
                z[c] = 1.0;
            else
                z[c - m] = kI;
            const auto Z = ambient.as_matrix(z);
            const CMat S = kI * (Z.adjoint() * A + A.adjoint() * Z);
            int r = 0;
            for (int a = 0; a < k; ++a) D(r++, c) = S(a, a).imag();
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b) {
                    D(r++, c) = S(a, b).real();
                    D(r++, c) = S(a, b).imag();
                }
        }
        return D;
    }
};

/// Ad-equivariance residual || mu(A u^dagger) - u mu(A) u^dagger ||; identity
/// for tori (coadjoint action trivial).
inline double check_equivariance(const MomentMap& mm, const CVec& q, const GroupElement& g) {
    const DualElem before = mm.eval(q);
    const DualElem after = mm.eval(act(mm.group, mm.ambient, g, q));
    if (mm.group.kind == GroupSpec::Kind::torus) return (after.t - before.t).norm();
    return (after.m - adjoint_orbit_map(mm.group, g, before.m)).norm();
}

enum class SamplerKind { sphere_gaussian, stiefel_gaussian, none };

struct LevelSetTolerances {
    double on_manifold = 1e-10;
    double tangent = 1e-8;
};

/**
 * Embedded regular level set N = mu^{-1}(c). The level must be fixed by the
 * coadjoint action (central for u(k)) so that the full group preserves N.
 */
struct LevelSet {
    MomentMap moment;
    DualElem level;
    RetractionKind retraction = RetractionKind::sphere_normalize;
    SamplerKind sampler = SamplerKind::none;
    LevelSetTolerances tol;

    LevelSet(MomentMap mm, DualElem c, RetractionKind r, SamplerKind s)
        : moment(std::move(mm)), level(std::move(c)), retraction(r), sampler(s) {
        if (moment.group.kind == GroupSpec::Kind::unitary) {
            const int k = moment.group.k;
            const CMat central = (level.m.trace() / static_cast<double>(k)) * CMat::Identity(k, k);
            if ((level.m - central).norm() > 1e-12)
                throw std::invalid_argument("level is not fixed by the coadjoint action");
        }
    }

    const GroupSpec& group() const { return moment.group; }
    const AmbientSpace& ambient() const { return moment.ambient; }

    /// Real dimension: 2m - p for tori, 2nk - k^2 for the Stiefel level.
    int dim() const { return moment.ambient.real_dim() - moment.codim(); }

    double level_residual(const CVec& q) const { return (moment.eval(q) - level).norm(); }

    CVec sample(Rng& rng) const {
        switch (sampler) {
            case SamplerKind::sphere_gaussian: {
                CVec z = rng.gaussian_cvec(moment.ambient.complex_dim());
                return z / real_norm(z);
            }
            case SamplerKind::stiefel_gaussian: {
                const int n = moment.ambient.rows, k = moment.ambient.cols;
                std::vector<CVec> cols;
                cols.reserve(k);
                for (int j = 0; j < k; ++j) cols.push_back(rng.gaussian_cvec(n));
                // complex Gram-Schmidt: columns end up unitary-orthonormal
                for (int j = 0; j < k; ++j) {
                    for (int pass = 0; pass < 2; ++pass)
                        for (int i = 0; i < j; ++i) cols[j] -= hermitian_dot(cols[j], cols[i]) * cols[i];
                    cols[j] /= real_norm(cols[j]);
                }
                CMat A(n, k);
                for (int j = 0; j < k; ++j) A.col(j) = cols[j];
                return moment.ambient.from_matrix(A);
            }
            case SamplerKind::none: break;
        }
        throw std::runtime_error("level set has no point sampler");
    }

    CVec retract_point(const CVec& q, const CVec& v) const { return retract(moment.ambient, retraction, q, v); }

    KernelBasis tangent_basis(const CVec& q) const {
        return real_kernel(moment.differential_real(q), moment.codim());
    }

    /// g-orthogonal projector onto T_q N = ker(d mu_q) as a matrix on the
    /// realification. Throws "singular level point" at non-regular points.
    RMat tangent_projector(const CVec& q) const {
        const auto kb = tangent_basis(q);
        const int d2 = moment.ambient.real_dim();
        RMat P = RMat::Zero(d2, d2);
        for (const CVec& f : kb.vectors) {
            const RVec fr = realify(f);
            P.noalias() += fr * fr.transpose();
        }
        return P;
    }

    CVec project_tangent(const CVec& q, const CVec& w) const {
        const auto kb = tangent_basis(q);
        CVec out = CVec::Zero(w.size());
        for (const CVec& f : kb.vectors) out += real_dot(f, w) * f;
        return out;
    }
};

/**
 * Orthonormal frames for the vertical space V_q (span of the generators) and
 * the horizontal space H_q (orthogonal complement of V_q inside ker d mu_q),
 * plus the raw generator Gram data used to read off algebra coefficients.
 * The horizontal frame is built in complex pairs (f, i f); that the pairing
 * closes is a consequence of the Hamiltonian structure, not an assumption,
 * and is surfaced by the J-invariance diagnostics.
 */
struct Splitting {
    CVec base;
    std::vector<LieAlg> algebra;      // basis used for the generators
    std::vector<CVec> generators;     // unnormalized generator vectors
    RMat gram;                        // g(gen_a, gen_b)
    Eigen::LDLT<RMat> gram_solver;
    double gram_cond = 0.0;
    std::vector<CVec> vertical_frame;
    std::vector<CVec> horizontal_frame;
    double regularity_sigma_min = 0.0;  // smallest nonzero singular value of d mu

    int vertical_dim() const { return static_cast<int>(vertical_frame.size()); }
    int horizontal_dim() const { return static_cast<int>(horizontal_frame.size()); }

    CVec project_vertical(const CVec& w) const {
        CVec out = CVec::Zero(w.size());
        for (const CVec& f : vertical_frame) out += real_dot(f, w) * f;
        return out;
    }

    CVec project_horizontal(const CVec& w) const {
        CVec out = CVec::Zero(w.size());
        for (const CVec& f : horizontal_frame) out += real_dot(f, w) * f;
        return out;
    }

    CVec project_tangent(const CVec& w) const { return project_vertical(w) + project_horizontal(w); }

    /// Coefficients a with Proj_V(w) = sum_k a_k gen_k, via the Gram system of
    /// the raw generators.
    RVec vertical_coordinates(const CVec& w) const {
        if (gram_cond > 1e12) throw std::runtime_error("ill-conditioned generator Gram matrix");
        RVec rhs(static_cast<Eigen::Index>(generators.size()));
        for (std::size_t a = 0; a < generators.size(); ++a)
            rhs[static_cast<Eigen::Index>(a)] = real_dot(generators[a], w);
        return gram_solver.solve(rhs);
    }

    CVec vertical_from_coords(const RVec& a) const {
        CVec out = CVec::Zero(base.size());
        for (std::size_t k = 0; k < generators.size(); ++k) out += a[static_cast<Eigen::Index>(k)] * generators[k];
        return out;
    }
};

inline Splitting split(const LevelSet& N, const CVec& q, const std::vector<LieAlg>& basis) {
    Splitting s;
    s.base = q;
    s.algebra = basis;
    s.generators.reserve(basis.size());
    for (const LieAlg& xi : basis) s.generators.push_back(generator(N.group(), N.ambient(), xi, q));

    s.vertical_frame = orthonormalize(s.generators, 1e-10);
    if (static_cast<int>(s.vertical_frame.size()) != N.group().dim())
        throw std::runtime_error("non-free point: dependent generators");

    const int dg = N.group().dim();
    s.gram.resize(dg, dg);
    for (int a = 0; a < dg; ++a)
        for (int b = 0; b <= a; ++b) s.gram(a, b) = s.gram(b, a) = real_dot(s.generators[a], s.generators[b]);
    s.gram_solver.compute(s.gram);
    Eigen::SelfAdjointEigenSolver<RMat> ge(s.gram);
    s.gram_cond = ge.eigenvalues()[dg - 1] / std::max(ge.eigenvalues()[0], 1e-300);

    const auto kb = N.tangent_basis(q);  // throws at singular level points
    s.regularity_sigma_min = kb.sigma_min_row;

    const int h_dim = N.dim() - dg;
    auto project_out = [&s](CVec w) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const CVec& f : s.vertical_frame) w -= real_dot(f, w) * f;
            for (const CVec& f : s.horizontal_frame) w -= real_dot(f, w) * f;
        }
        return w;
    };
    std::vector<CVec> candidates = kb.vectors;
    while (static_cast<int>(s.horizontal_frame.size()) < h_dim) {
        int best = -1;
        double best_norm = 0.0;
        std::vector<CVec> residuals(candidates.size());
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            residuals[j] = project_out(candidates[j]);
            const double n = real_norm(residuals[j]);
            if (n > best_norm) {
                best_norm = n;
                best = static_cast<int>(j);
            }
        }
        if (best < 0 || best_norm < 1e-8) throw std::runtime_error("horizontal frame construction failed");
        CVec f = residuals[best] / best_norm;
        candidates.erase(candidates.begin() + best);
        s.horizontal_frame.push_back(f);
        CVec fi = project_out(kI * f);
        const double ni = real_norm(fi);
        if (ni < 0.5) throw std::runtime_error("horizontal space is not complex-invariant");
        s.horizontal_frame.push_back(fi / ni);
    }
    return s;
}

inline Splitting split(const LevelSet& N, const CVec& q) { return split(N, q, algebra_basis(N.group())); }

/// Pointwise reduced Kahler data: the ambient metric, complex structure and
/// 2-form restricted to H_q, expressed in the horizontal frame.
struct ReducedKahler {
    RMat metric;             // g(e_a, e_b), identity up to frame accuracy
    RMat complex_structure;  // column b holds the frame coordinates of i e_b
    RMat two_form;           // omega(e_a, e_b)
};

inline ReducedKahler reduced_kahler_data(const Splitting& s, const AmbientSpace& amb) {
    const int d = s.horizontal_dim();
    ReducedKahler out;
    out.metric.resize(d, d);
    out.complex_structure.resize(d, d);
    out.two_form.resize(d, d);
    for (int b = 0; b < d; ++b) {
        const CVec ib = kI * s.horizontal_frame[b];
        for (int a = 0; a < d; ++a) {
            out.metric(a, b) = amb.metric(s.horizontal_frame[a], s.horizontal_frame[b]);
            out.complex_structure(a, b) = amb.metric(s.horizontal_frame[a], ib);
            out.two_form(a, b) = amb.sympl(s.horizontal_frame[a], s.horizontal_frame[b]);
        }
    }
    return out;
}

}  // namespace kred
