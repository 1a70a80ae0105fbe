#pragma once

#include "kred/torus_action.hpp"

#include <limits>

namespace kred {

/**
 * Local slice through `base`: the retraction image of the horizontal space,
 * t -> retract(base, sum_a t_a frame_a). Transverse to the orbits by
 * construction. For the sphere retraction the image is { w : h(w, base) real
 * positive } and inversion is exact; for the polar retraction it is
 * { W : base^dagger W Hermitian positive definite }.
 */
struct Slice {
    const LevelSet* N = nullptr;
    CVec base;
    std::vector<CVec> frame;  // g-orthonormal, complex-paired horizontal frame
    double radius = 0.0;

    int dim() const { return static_cast<int>(frame.size()); }

    CVec horizontal_vector(const RVec& t) const {
        if (t.size() != dim()) throw std::invalid_argument("slice coordinate size mismatch");
        CVec v = CVec::Zero(base.size());
        for (int a = 0; a < dim(); ++a) v += t[a] * frame[a];
        return v;
    }

    CVec map(const RVec& t) const {
        if (t.norm() > radius + 1e-12) throw std::domain_error("slice coordinates out of radius");
        return N->retract_point(base, horizontal_vector(t));
    }

    /// Exact inverse of the slice map; throws if w is not on this slice.
    RVec invert(const CVec& w) const {
        CVec v;
        if (N->retraction == RetractionKind::sphere_normalize) {
            const Cplx rho = N->ambient().hermitian(w, base);
            if (rho.real() < 1e-9 || std::abs(rho.imag()) > 1e-7)
                throw std::runtime_error("point not on slice");
            v = w / rho.real() - base;
        } else {
            const auto B = N->ambient().as_matrix(base);
            const auto W = N->ambient().as_matrix(w);
            const CMat S = B.adjoint() * W;  // should be Hermitian positive definite on the slice
            if ((S - S.adjoint()).norm() > 1e-7) throw std::runtime_error("point not on slice");
            Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (S + S.adjoint()));
            if (eig.eigenvalues().minCoeff() < 1e-9) throw std::runtime_error("point not on slice");
            v = N->ambient().from_matrix(W * S.inverse() - B);
        }
        RVec t(dim());
        for (int a = 0; a < dim(); ++a) t[a] = real_dot(frame[a], v);
        return t;
    }
};

inline Slice make_slice(const ProductACS& acs, int factor, const CVec& base, double radius) {
    const LevelSet& N = factor == 1 ? acs.factor1() : acs.factor2();
    const Splitting& s = factor == 1 ? acs.split1(base) : acs.split2(base);
    return {&N, base, s.horizontal_frame, radius};
}

/**
 * Chart data for the product: Phi(t1, t2, z) = psi_z(Sigma1(t1), Sigma2(t2)),
 * z running over a fundamental cell of the period lattice.
 */
struct ChartMap {
    Slice s1, s2;
    PsiAction psi;
    Lattice2D lattice;

    static ChartMap make(const PsiAction& psi, const CVec& base1, const CVec& base2, double radius) {
        ChartMap c;
        c.psi = psi;
        c.s1 = make_slice(*psi.acs, 1, base1, radius);
        c.s2 = make_slice(*psi.acs, 2, base2, radius);
        c.lattice = psi.period_lattice();
        return c;
    }

    int domain_dim() const { return s1.dim() + s2.dim() + 2; }

    ProductPoint apply(const RVec& t1, const RVec& t2, Cplx z) const {
        return psi.apply(z, {s1.map(t1), s2.map(t2)});
    }

    ProductPoint base_pair() const { return {s1.base, s2.base}; }

    /// Inverse chart: recovers (t1, t2, z) with z in the fundamental cell.
    /// Throws "not on orbit" when n does not reach the slices.
    struct Inverse {
        RVec t1, t2;
        Cplx z;
        double residual = 0.0;
    };

    Inverse invert(const ProductPoint& n, double tol = 1e-6) const;
};

namespace detail {
/// Parameters beta with act(circle(beta), x) on the slice, one candidate per
/// phase branch. Requires the circle to act through a single weight on the
/// coordinates that matter (true for the gallery circles).
inline std::vector<double> align_to_slice(const Slice& slice, const CircleSpec& circle, const CVec& x) {
    const LevelSet& N = *slice.N;
    if (circle.kind == CircleSpec::Kind::unitary_diag) {
        const auto B = N.ambient().as_matrix(slice.base);
        const auto X = N.ambient().as_matrix(x);
        const Cplx d = hermitian_dot(X.col(circle.diag_index), B.col(circle.diag_index));
        if (std::abs(d) < 1e-9) throw std::runtime_error("phase unobservable");
        // act(circle(beta)) multiplies the column by exp(-2 pi i beta)
        return {std::arg(d) / kTwoPi};
    }
    detail::require_torus(N.group(), N.ambient());
    const Cplx overlap = N.ambient().hermitian(x, slice.base);
    int weight = 0;
    for (int j = 0; j < x.size(); ++j) {
        const int w = circle.dir.dot(N.group().weights.row(j).transpose());
        if (w == 0) continue;
        if (weight == 0)
            weight = w;
        else if (weight != w)
            throw std::runtime_error("slice alignment needs a uniform circle weight");
    }
    if (weight == 0 || std::abs(overlap) < 1e-9) throw std::runtime_error("phase unobservable");
    // act(circle(beta)) multiplies through exp(2 pi i weight beta); we want
    // h(act(circle(beta)) x, base) real positive.
    std::vector<double> out;
    const double theta = -std::arg(overlap) / kTwoPi;
    for (int m = 0; m < std::abs(weight); ++m) out.push_back((theta + m) / weight);
    return out;
}

/// Solve A^T (a, b) = (phi1, phi2) for z = a + i b (any integer lift gives a
/// lattice-equivalent z; the result is reduced to the fundamental cell).
inline Cplx solve_mixing(const Eigen::Matrix2i& A, const Lattice2D& lattice, double phi1, double phi2) {
    const double det = static_cast<double>(A(0, 0)) * A(1, 1) - static_cast<double>(A(0, 1)) * A(1, 0);
    const double a = (A(1, 1) * phi1 - A(1, 0) * phi2) / det;
    const double b = (-A(0, 1) * phi1 + A(0, 0) * phi2) / det;
    return lattice.reduce({a, b});
}
}  // namespace detail

/**
 * Fiber coordinate between two points on one psi-orbit: the z (mod period
 * lattice, unique in the fundamental cell) with psi_z(q_from) = q_to.
 * Recovered from phase ratios, then verified; candidates come from the phase
 * branches of each factor circle.
 */
inline Cplx solve_group_element(const PsiAction& psi, const ProductPoint& q_from, const ProductPoint& q_to,
                                double orbit_tol = 1e-6) {
    const ProductACS& acs = *psi.acs;
    const Lattice2D lattice = psi.period_lattice();
    const auto cand1 =
        recover_circle_phase(psi.circle1, acs.factor1().group(), acs.factor1().ambient(), q_from.p1, q_to.p1);
    const auto cand2 =
        recover_circle_phase(psi.circle2, acs.factor2().group(), acs.factor2().ambient(), q_from.p2, q_to.p2);
    Cplx best_z = 0.0;
    double best_res = std::numeric_limits<double>::infinity();
    for (const double phi1 : cand1)
        for (const double phi2 : cand2) {
            const Cplx z = detail::solve_mixing(psi.mixing, lattice, phi1, phi2);
            const ProductPoint moved = psi.apply(z, q_from);
            const double res = std::sqrt((moved.p1 - q_to.p1).squaredNorm() + (moved.p2 - q_to.p2).squaredNorm());
            if (res < best_res) {
                best_res = res;
                best_z = z;
            }
        }
    if (best_res > orbit_tol) throw std::runtime_error("points not on a common orbit");
    return best_z;
}

inline ChartMap::Inverse ChartMap::invert(const ProductPoint& n, double tol) const {
    const auto beta1 = detail::align_to_slice(s1, psi.circle1, n.p1);
    const auto beta2 = detail::align_to_slice(s2, psi.circle2, n.p2);
    Inverse best;
    best.residual = std::numeric_limits<double>::infinity();
    for (const double b1 : beta1)
        for (const double b2 : beta2) {
            // slice points w_j = act(circle(beta_j), n_j), so n = psi_z(w)
            // with factor phases (-beta_1, -beta_2)
            const CVec w1 = act(psi.acs->factor1().group(), psi.acs->factor1().ambient(),
                                psi.circle1.element(psi.acs->factor1().group(), b1), n.p1);
            const CVec w2 = act(psi.acs->factor2().group(), psi.acs->factor2().ambient(),
                                psi.circle2.element(psi.acs->factor2().group(), b2), n.p2);
            RVec t1, t2;
            try {
                t1 = s1.invert(w1);
                t2 = s2.invert(w2);
            } catch (const std::runtime_error&) {
                continue;
            }
            if (t1.norm() > s1.radius + 1e-9 || t2.norm() > s2.radius + 1e-9) continue;
            const Cplx z = detail::solve_mixing(psi.mixing, lattice, -b1, -b2);
            const ProductPoint back = apply(t1, t2, z);
            const double res =
                std::sqrt((back.p1 - n.p1).squaredNorm() + (back.p2 - n.p2).squaredNorm());
            if (res < best.residual) best = {t1, t2, z, res};
        }
    if (!(best.residual <= tol)) throw std::runtime_error("points not on a common orbit");
    return best;
}

/// Differential of the chart map, realified: columns are the images of the
/// domain directions. Analytic at the origin, central differences elsewhere.
inline RMat chart_differential(const ChartMap& c, const RVec& t1, const RVec& t2, Cplx z, double fd_step) {
    const int d1 = c.s1.dim(), d2 = c.s2.dim();
    const int m1 = c.s1.base.size(), m2 = c.s2.base.size();
    RMat D(2 * (m1 + m2), d1 + d2 + 2);
    auto pack = [&](const ProductTangent& w, int col) {
        D.col(col).head(2 * m1) = realify(w.v1);
        D.col(col).tail(2 * m2) = realify(w.v2);
    };
    const bool at_origin = t1.norm() == 0.0 && t2.norm() == 0.0;
    if (at_origin) {
        // d Slice at 0 is the frame; the action psi_z pushes it forward
        for (int a = 0; a < d1; ++a)
            pack(c.psi.push_tangent(z, {c.s1.frame[a], CVec::Zero(m2)}), a);
        for (int a = 0; a < d2; ++a)
            pack(c.psi.push_tangent(z, {CVec::Zero(m1), c.s2.frame[a]}), d1 + a);
    } else {
        RVec x(d1 + d2);
        x.head(d1) = t1;
        x.tail(d2) = t2;
        for (int a = 0; a < d1 + d2; ++a) {
            RVec xp = x, xm = x;
            xp[a] += fd_step;
            xm[a] -= fd_step;
            const ProductPoint plus = c.apply(xp.head(d1), xp.tail(d2), z);
            const ProductPoint minus = c.apply(xm.head(d1), xm.tail(d2), z);
            pack((1.0 / (2.0 * fd_step)) * ProductTangent{plus.p1 - minus.p1, plus.p2 - minus.p2}, a);
        }
    }
    const ProductPoint at = c.apply(t1, t2, z);
    pack(c.psi.orbit_derivative(1, at), d1 + d2);
    pack(c.psi.orbit_derivative(2, at), d1 + d2 + 1);
    return D;
}

struct LocalDiffeoReport {
    double min_singular_base = 0.0;
    double min_singular_sampled = 0.0;
    int rank_base = 0;
};

inline LocalDiffeoReport check_local_diffeo(const ChartMap& c, int samples, Rng& rng) {
    LocalDiffeoReport rep;
    const int d1 = c.s1.dim(), d2 = c.s2.dim();
    {
        const RMat D = chart_differential(c, RVec::Zero(d1), RVec::Zero(d2), 0.0, 0.0);
        Eigen::JacobiSVD<RMat> svd(D);
        rep.min_singular_base = svd.singularValues().minCoeff();
        rep.rank_base = 0;
        for (int j = 0; j < svd.singularValues().size(); ++j)
            if (svd.singularValues()[j] > 1e-6 * svd.singularValues()[0]) ++rep.rank_base;
    }
    rep.min_singular_sampled = rep.min_singular_base;
    const double span = 0.5 * std::min(c.s1.radius, c.s2.radius);
    const double step = std::min(1e-5, 0.05 * span);
    if (step <= 0.0) return rep;
    for (int s = 0; s < samples; ++s) {
        RVec t1 = rng.gaussian_rvec(d1), t2 = rng.gaussian_rvec(d2);
        if (t1.norm() > 0) t1 *= span * rng.uniform() / t1.norm();
        if (t2.norm() > 0) t2 *= span * rng.uniform() / t2.norm();
        const Cplx z{rng.uniform(), rng.uniform()};
        const Cplx zc = c.lattice.reduce(z);
        const RMat D = chart_differential(c, t1, t2, zc, step);
        Eigen::JacobiSVD<RMat> svd(D);
        rep.min_singular_sampled = std::min(rep.min_singular_sampled, svd.singularValues().minCoeff());
    }
    return rep;
}

/**
 * Complex-linearity residual of the chart differential: the domain carries i
 * on the paired horizontal frames and on the z-plane; the target carries J.
 * Residuals are reported per unit domain direction.
 *
 * Sampled t stay within `t_scale` of the slice origin: the horizontal
 * distribution is not integrable, so slice tangents acquire a vertical
 * component of first order in |t| and the pointwise identity degrades
 * linearly away from the central orbit. The z-plane direction is exact at
 * any t.
 */
inline double check_phi_complex_linear(const ChartMap& c, int samples, Rng& rng, double t_scale = 1e-6) {
    const ProductACS& acs = *c.psi.acs;
    const int d1 = c.s1.dim(), d2 = c.s2.dim();
    const int dd = d1 + d2 + 2;
    auto jdom = [&](const RVec& delta) {
        RVec out(dd);
        for (int a = 0; a + 1 < dd; a += 2) {
            out[a] = -delta[a + 1];
            out[a + 1] = delta[a];
        }
        return out;
    };
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        RVec t1 = rng.gaussian_rvec(d1), t2 = rng.gaussian_rvec(d2);
        if (t1.norm() > 0) t1 *= t_scale * rng.uniform() / t1.norm();
        if (t2.norm() > 0) t2 *= t_scale * rng.uniform() / t2.norm();
        const Cplx z = c.lattice.reduce({rng.uniform(), rng.uniform()});
        const RMat D = chart_differential(c, t1, t2, z, 1e-5);
        const ProductPoint at = c.apply(t1, t2, z);
        const int m1 = c.s1.base.size();
        for (int dir = 0; dir < 3; ++dir) {
            RVec delta(dd);
            for (int j = 0; j < dd; ++j) delta[j] = rng.gaussian();
            delta /= delta.norm();
            const RVec lhs_dom = jdom(delta);
            const RVec lhs_img = D * lhs_dom;
            const RVec rhs_pre = D * delta;
            ProductTangent w{unrealify(rhs_pre.head(2 * m1)), unrealify(rhs_pre.tail(rhs_pre.size() - 2 * m1))};
            const ProductTangent jw = acs.apply_J(at, w);
            ProductTangent lhs{unrealify(lhs_img.head(2 * m1)), unrealify(lhs_img.tail(lhs_img.size() - 2 * m1))};
            worst = std::max(worst, (lhs - jw).norm());
        }
    }
    return worst;
}

struct TransitionReport {
    Eigen::MatrixXcd h_values;      // h(p) over the grid
    double max_round_trip = 0.0;    // || psi_h(slice A point) - slice B point ||
    double max_g_dependence = 0.0;  // violation of (p, g) -> (p, g + h(p))
    double max_neighbor_jump = 0.0;
    double grid_spacing = 0.0;
};

/**
 * Samples the transition between two charts over an n-by-n grid of base
 * points (factor-1 coordinate along the first frame direction of chart A,
 * factor-2 likewise) and verifies the right-translation form: for random g,
 * the chart-A fiber coordinate of psi_g(chart-B representative) equals
 * g + h(p) mod the period lattice.
 */
inline TransitionReport transition_function(const ChartMap& ca, const ChartMap& cb, int grid_n, double span,
                                            int g_samples, Rng& rng) {
    TransitionReport rep;
    rep.h_values.resize(grid_n, grid_n);
    rep.grid_spacing = grid_n > 1 ? 2.0 * span / (grid_n - 1) : 0.0;
    const Lattice2D lattice = ca.psi.period_lattice();
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            RVec t1 = RVec::Zero(ca.s1.dim()), t2 = RVec::Zero(ca.s2.dim());
            if (grid_n > 1) {
                t1[0] = -span + rep.grid_spacing * i;
                t2[0] = -span + rep.grid_spacing * j;
            }
            const ProductPoint pa = ca.apply(t1, t2, 0.0);
            const auto inv = cb.invert(pa);
            const ProductPoint pb{cb.s1.map(inv.t1), cb.s2.map(inv.t2)};
            const Cplx h = solve_group_element(ca.psi, pa, pb);
            rep.h_values(i, j) = h;
            {
                const ProductPoint moved = ca.psi.apply(h, pa);
                const double res = std::sqrt((moved.p1 - pb.p1).squaredNorm() + (moved.p2 - pb.p2).squaredNorm());
                rep.max_round_trip = std::max(rep.max_round_trip, res);
            }
            for (int s = 0; s < g_samples; ++s) {
                const Cplx g = lattice.reduce({rng.uniform(), rng.uniform()});
                const ProductPoint n = ca.psi.apply(g, pb);  // = H_tilde(p, g)
                const Cplx theta = solve_group_element(ca.psi, pa, n);
                rep.max_g_dependence = std::max(rep.max_g_dependence, lattice.distance_mod(theta, g + h));
            }
        }
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j + 1 < grid_n; ++j) {
            rep.max_neighbor_jump =
                std::max(rep.max_neighbor_jump, lattice.distance_mod(rep.h_values(i, j + 1), rep.h_values(i, j)));
            rep.max_neighbor_jump =
                std::max(rep.max_neighbor_jump, lattice.distance_mod(rep.h_values(j + 1, i), rep.h_values(j, i)));
        }
    return rep;
}

}  // namespace kred
