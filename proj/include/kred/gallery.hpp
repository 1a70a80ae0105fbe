#pragma once

#include "kred/charts.hpp"
#include "kred/nijenhuis.hpp"

#include <memory>
#include <sstream>

namespace kred {

/**
 * A concrete product instance wired together: two level sets with a shared
 * structure group, the almost complex structure, the commuting algebra used
 * for vertical sampling, and the default circle pair for the mixed C-action.
 *
 *   sphere:n,m          S^{2n+1} x S^{2m+1} with the diagonal circle actions
 *   stiefel:k,n         V_k(C^n) x V_k(C^n) under U(k)
 *   stiefel-torus:k,n,p V_k(C^n) x V_k(C^n) with a p-dimensional diagonal
 *                       torus of U(k) selected for sampling and orbits
 *   calabi-eckmann:n[,T] sphere product against a rank-T truncation of a
 *                       separable Hilbert space factor (default T = 25)
 *
 * The stiefel-torus geometry (level set, splitting, J) is that of the full
 * U(k) reduction; the subtorus enters through the sampled verticals, the
 * expected commutativity, and the orbit circles. Building the splitting from
 * the subtorus alone would not leave the horizontal spaces i-invariant on
 * the frame manifold, so no almost complex structure would arise that way.
 */
struct GalleryInstance {
    std::string name;
    std::shared_ptr<ProductACS> acs;
    bool abelian = true;
    std::vector<LieAlg> sampling_algebra;    // verticals drawn in field sampling
    std::vector<LieAlg> holomorphy_algebra;  // verticals invariant under the psi translations
    CircleSpec circle;                       // per-factor circle for psi actions
    int dim_n1 = 0, dim_n2 = 0;

    PsiAction psi(Eigen::Matrix2i mixing) const {
        PsiAction p;
        p.acs = acs.get();
        p.mixing = std::move(mixing);
        p.circle1 = circle;
        p.circle2 = circle;
        return p;
    }

    PsiAction psi() const { return psi(PsiAction::default_mixing()); }
};

namespace detail {
inline LevelSet hopf_sphere(int complex_dim) {
    const AmbientSpace amb = AmbientSpace::vector_space(complex_dim);
    Eigen::MatrixXi W = Eigen::MatrixXi::Ones(complex_dim, 1);
    RVec offset(1);
    offset[0] = -kPi;  // unit sphere = level 0
    MomentMap mm = MomentMap::torus(GroupSpec::torus(std::move(W)), amb, std::move(offset));
    return LevelSet(std::move(mm), DualElem::torus(RVec::Zero(1)), RetractionKind::sphere_normalize,
                    SamplerKind::sphere_gaussian);
}

inline LevelSet stiefel_level(int k, int n) {
    const AmbientSpace amb = AmbientSpace::matrix_space(n, k);
    MomentMap mm = MomentMap::unitary(GroupSpec::unitary(k), amb);
    return LevelSet(std::move(mm), DualElem::unitary(kI * CMat::Identity(k, k)), RetractionKind::stiefel_polar,
                    SamplerKind::stiefel_gaussian);
}
}  // namespace detail

/// S^{2n+1} x S^{2m+1} with weight-one circle actions. Abelian, so the
/// product structure is integrable.
inline GalleryInstance make_sphere_product(int n, int m) {
    if (n < 0 || m < 0) throw std::invalid_argument("sphere exponents must be nonnegative");
    GalleryInstance g;
    g.name = "sphere:" + std::to_string(n) + "," + std::to_string(m);
    g.acs = std::make_shared<ProductACS>(detail::hopf_sphere(n + 1), detail::hopf_sphere(m + 1));
    g.abelian = true;
    g.sampling_algebra = algebra_basis(g.acs->factor1().group());
    g.holomorphy_algebra = g.sampling_algebra;
    g.circle = CircleSpec::torus_direction(Eigen::VectorXi::Ones(1));
    g.dim_n1 = 2 * n + 1;
    g.dim_n2 = 2 * m + 1;
    return g;
}

/// V_k(C^n) x V_k(C^n) under U(k). Nonabelian for k >= 2: the designated
/// vertical pairs give a nonvanishing Nijenhuis tensor.
inline GalleryInstance make_stiefel_product(int k, int n) {
    if (k < 1 || n < k) throw std::invalid_argument("stiefel requires n >= k >= 1");
    GalleryInstance g;
    g.name = "stiefel:" + std::to_string(k) + "," + std::to_string(n);
    g.acs = std::make_shared<ProductACS>(detail::stiefel_level(k, n), detail::stiefel_level(k, n));
    g.abelian = (k == 1);
    g.sampling_algebra = algebra_basis(g.acs->factor1().group());
    // translations rotate by diagonal elements, whose Ad fixes exactly the
    // diagonal subalgebra; off-diagonal verticals are not invariant
    g.holomorphy_algebra.clear();
    for (int a = 0; a < k; ++a) {
        CMat xi = CMat::Zero(k, k);
        xi(a, a) = kI;
        g.holomorphy_algebra.push_back(LieAlg::unitary(std::move(xi)));
    }
    g.circle = CircleSpec::unitary_diag(0);
    g.dim_n1 = g.dim_n2 = 2 * n * k - k * k;
    return g;
}

/// The Stiefel product with a p-dimensional diagonal torus of U(k) selected:
/// vertical sampling is restricted to the commuting diagonal algebra and the
/// default orbit circle is the first coordinate circle.
inline GalleryInstance make_torus_in_stiefel(int k, int n, int p) {
    if (p < 1 || p > k) throw std::invalid_argument("torus rank must satisfy 1 <= p <= k");
    GalleryInstance g = make_stiefel_product(k, n);
    g.name = "stiefel-torus:" + std::to_string(k) + "," + std::to_string(n) + "," + std::to_string(p);
    g.abelian = true;
    g.sampling_algebra.clear();
    for (int a = 0; a < p; ++a) {
        CMat xi = CMat::Zero(k, k);
        xi(a, a) = kI;
        g.sampling_algebra.push_back(LieAlg::unitary(std::move(xi)));
    }
    g.holomorphy_algebra = g.sampling_algebra;
    g.circle = CircleSpec::unitary_diag(0);
    return g;
}

/// Desk-scale stand-in for a sphere times the unit sphere of a separable
/// Hilbert space: the second factor is truncated to T complex dimensions.
inline GalleryInstance make_truncated_hilbert_product(int n, int truncation = 25) {
    if (truncation < 1) throw std::invalid_argument("truncation must be positive");
    GalleryInstance g = make_sphere_product(n, truncation - 1);
    g.name = "calabi-eckmann:" + std::to_string(n) + "," + std::to_string(truncation);
    return g;
}

/// Parses "sphere:1,2", "stiefel:2,4", "stiefel-torus:2,4,1",
/// "calabi-eckmann:1[,25]".
inline GalleryInstance parse_instance(const std::string& name) {
    const auto colon = name.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("unknown instance: " + name);
    const std::string kind = name.substr(0, colon);
    std::vector<int> args;
    {
        std::stringstream ss(name.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) args.push_back(std::stoi(tok));
    }
    if (kind == "sphere" && args.size() == 2) return make_sphere_product(args[0], args[1]);
    if (kind == "stiefel" && args.size() == 2) return make_stiefel_product(args[0], args[1]);
    if (kind == "stiefel-torus" && args.size() == 3) return make_torus_in_stiefel(args[0], args[1], args[2]);
    if (kind == "calabi-eckmann" && args.size() == 1) return make_truncated_hilbert_product(args[0]);
    if (kind == "calabi-eckmann" && args.size() == 2) return make_truncated_hilbert_product(args[0], args[1]);
    throw std::invalid_argument("unknown instance: " + name);
}

inline std::vector<std::string> instance_catalog() {
    return {"sphere:n,m", "stiefel:k,n", "stiefel-torus:k,n,p", "calabi-eckmann:n[,T]"};
}

}  // namespace kred
