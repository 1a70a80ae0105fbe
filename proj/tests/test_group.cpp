#include "kred/group.hpp"

#include <doctest.h>

using namespace kred;

namespace {
const AmbientSpace kHom24 = AmbientSpace::matrix_space(4, 2);
const GroupSpec kU2 = GroupSpec::unitary(2);

CVec random_frame_point(Rng& rng) {
    CMat A(4, 2);
    A.col(0) = rng.gaussian_cvec(4);
    A.col(1) = rng.gaussian_cvec(4);
    return kHom24.from_matrix(A);
}
}  // namespace

TEST_CASE("unitary action composes as a left action") {
    Rng rng(21);
    const CVec q = random_frame_point(rng);
    const GroupElement u1 = random_element(kU2, rng), u2 = random_element(kU2, rng);
    const CVec two_step = act(kU2, kHom24, u2, act(kU2, kHom24, u1, q));
    const CVec one_step = act(kU2, kHom24, compose(kU2, u2, u1), q);
    CHECK(real_norm(two_step - one_step) <= 1e-13 * real_norm(q));
}

TEST_CASE("act rejects non-unitary group elements") {
    Rng rng(22);
    const CVec q = random_frame_point(rng);
    CMat not_unitary = 2.0 * CMat::Identity(2, 2);
    CHECK_THROWS_AS((void)act(kU2, kHom24, GroupElement::unitary(not_unitary), q), std::invalid_argument);
}

TEST_CASE("torus identity acts trivially") {
    const AmbientSpace amb = AmbientSpace::vector_space(3);
    const GroupSpec circle = GroupSpec::torus(Eigen::MatrixXi::Ones(3, 1));
    Rng rng(2);
    const CVec q = amb.random_element(rng);
    const CVec moved = act(circle, amb, GroupElement::torus(RVec::Zero(1)), q);
    CHECK(real_norm(moved - q) == 0.0);
}

TEST_CASE("actions preserve the hermitian metric and commute with i") {
    Rng rng(23);
    const CVec a = random_frame_point(rng), b = random_frame_point(rng);
    const GroupElement u = random_element(kU2, rng);
    const Cplx before = kHom24.hermitian(a, b);
    const Cplx after = kHom24.hermitian(act(kU2, kHom24, u, a), act(kU2, kHom24, u, b));
    CHECK(std::abs(after - before) <= 1e-13 * (1.0 + std::abs(before)));

    for (int j = 0; j < kHom24.complex_dim(); ++j) {
        CVec e = CVec::Zero(kHom24.complex_dim());
        e[j] = 1.0;
        const CVec lhs = act(kU2, kHom24, u, CVec(kI * e));
        const CVec rhs = kI * act(kU2, kHom24, u, e);
        CHECK(real_norm(lhs - rhs) <= 1e-14);
    }
}

TEST_CASE("generators") {
    Rng rng(25);
    const CVec q = random_frame_point(rng);

    SUBCASE("unitary generator is right multiplication by xi") {
        const LieAlg xi = random_algebra(kU2, rng);
        const CVec expected = kHom24.from_matrix(kHom24.as_matrix(q) * xi.xi);
        CHECK(real_norm(generator(kU2, kHom24, xi, q) - expected) == 0.0);

        // the generator flow is t -> A exp(t xi), i.e. act(exp(-t xi), A)
        const double t = 1e-5;
        const CVec plus = act(kU2, kHom24, exp_element(kU2, LieAlg::unitary(CMat(-t * xi.xi))), q);
        const CVec minus = act(kU2, kHom24, exp_element(kU2, LieAlg::unitary(CMat(t * xi.xi))), q);
        const CVec fd = (plus - minus) / (2.0 * t);
        CHECK(real_norm(fd - generator(kU2, kHom24, xi, q)) <= 1e-7);
    }

    SUBCASE("zero element generates the zero field") {
        const LieAlg zero = LieAlg::unitary(CMat::Zero(2, 2));
        CHECK(real_norm(generator(kU2, kHom24, zero, q)) == 0.0);
    }

    SUBCASE("torus generator matches a central difference of the action") {
        const AmbientSpace amb = AmbientSpace::vector_space(3);
        Eigen::MatrixXi W(3, 2);
        W << 1, 0, 1, 1, 1, -2;
        const GroupSpec torus = GroupSpec::torus(W);
        const CVec z = amb.random_element(rng);
        const RVec theta = rng.gaussian_rvec(2);
        const double t = 1e-4;
        const CVec plus = act(torus, amb, GroupElement::torus(RVec(t * theta)), z);
        const CVec minus = act(torus, amb, GroupElement::torus(RVec(-t * theta)), z);
        const CVec fd = (plus - minus) / (2.0 * t);
        CHECK(real_norm(fd - generator(torus, amb, LieAlg::torus(theta), z)) <= 1e-6);
    }
}

TEST_CASE("algebra bracket") {
    SUBCASE("tori are abelian") {
        const GroupSpec torus = GroupSpec::torus(Eigen::MatrixXi::Ones(2, 3));
        Rng rng(1);
        const LieAlg a = random_algebra(torus, rng), b = random_algebra(torus, rng);
        CHECK(bracket(torus, a, b).theta.norm() == 0.0);
    }

    SUBCASE("u(2) bracket of the designated pair") {
        CMat xi = CMat::Zero(2, 2), eta = CMat::Zero(2, 2);
        xi(0, 1) = 1.0;
        xi(1, 0) = -1.0;
        eta(0, 1) = kI;
        eta(1, 0) = kI;
        const CMat expected = (CMat(2, 2) << Cplx(0, 2), 0, 0, Cplx(0, -2)).finished();
        CHECK((bracket(kU2, LieAlg::unitary(xi), LieAlg::unitary(eta)).xi - expected).norm() == 0.0);
        CHECK(bracket(kU2, LieAlg::unitary(xi), LieAlg::unitary(xi)).xi.norm() == 0.0);
    }
}

TEST_CASE("coadjoint motion") {
    Rng rng(31);
    const GroupElement u = random_element(kU2, rng);
    const CMat central = kI * CMat::Identity(2, 2);
    CHECK((adjoint_orbit_map(kU2, u, central) - central).norm() <= 1e-14);

    const LieAlg m = random_algebra(kU2, rng);
    CHECK((adjoint_orbit_map(kU2, GroupElement::unitary(CMat::Identity(2, 2)), m.xi) - m.xi).norm() == 0.0);
    CHECK(std::abs(adjoint_orbit_map(kU2, u, m.xi).trace() - m.xi.trace()) <= 1e-13);
}

TEST_CASE("exp produces unitary matrices and pushes generators equivariantly") {
    Rng rng(33);
    const LieAlg xi = random_algebra(kU2, rng);
    const GroupElement u = exp_element(kU2, xi);
    CHECK((u.u.adjoint() * u.u - CMat::Identity(2, 2)).norm() <= 1e-13);
    CHECK((exp_element(kU2, LieAlg::unitary(CMat::Zero(2, 2))).u - CMat::Identity(2, 2)).norm() == 0.0);

    // act(u)_* gen(xi, q) = gen(Ad_u xi, act(u) q)
    const CVec q = random_frame_point(rng);
    const LieAlg eta = random_algebra(kU2, rng);
    const CVec pushed = act(kU2, kHom24, u, generator(kU2, kHom24, eta, q));
    const LieAlg ad = LieAlg::unitary(u.u * eta.xi * u.u.adjoint());
    const CVec expected = generator(kU2, kHom24, ad, act(kU2, kHom24, u, q));
    CHECK(real_norm(pushed - expected) <= 1e-10 * real_norm(q));
}

TEST_CASE("skew-hermitian invariant of random algebra elements") {
    Rng rng(35);
    const LieAlg xi = random_algebra(kU2, rng);
    CHECK((xi.xi.adjoint() + xi.xi).norm() <= 1e-14 * std::max(1.0, xi.xi.norm()));
}
