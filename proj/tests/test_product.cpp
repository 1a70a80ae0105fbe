#include "kred/gallery.hpp"

#include <doctest.h>

using namespace kred;

namespace {
ProductTangent generator_pair(const ProductACS& acs, const LieAlg& xi, const ProductPoint& q, int factor) {
    ProductTangent w{CVec::Zero(q.p1.size()), CVec::Zero(q.p2.size())};
    if (factor == 1)
        w.v1 = generator(acs.factor1().group(), acs.factor1().ambient(), xi, q.p1);
    else
        w.v2 = generator(acs.factor2().group(), acs.factor2().ambient(), xi, q.p2);
    return w;
}
}  // namespace

TEST_CASE("decompose splits tangents along (H + V) x (H + V)") {
    const GalleryInstance inst = parse_instance("stiefel:2,4");
    const ProductACS& acs = *inst.acs;
    Rng rng(41);
    const ProductPoint q = acs.sample_point(rng);
    const auto basis = algebra_basis(acs.factor1().group());

    SUBCASE("pure vertical") {
        const LieAlg xi = random_algebra(acs.factor1().group(), rng);
        const Decomposition d = acs.decompose(q, generator_pair(acs, xi, q, 1));
        const RVec xi_coords = acs.split1(q.p1).vertical_coordinates(
            generator(acs.factor1().group(), acs.factor1().ambient(), xi, q.p1));
        CHECK((d.a - xi_coords).norm() <= 1e-11);
        CHECK(real_norm(d.h1) <= 1e-11);
        CHECK(real_norm(d.h2) == 0.0);
        CHECK(d.b.norm() <= 1e-12);
    }

    SUBCASE("pure horizontal passes through") {
        ProductTangent w{acs.split1(q.p1).project_horizontal(rng.gaussian_cvec(q.p1.size())),
                         acs.split2(q.p2).project_horizontal(rng.gaussian_cvec(q.p2.size()))};
        const Decomposition d = acs.decompose(q, w);
        CHECK(d.a.norm() <= 1e-10);
        CHECK(d.b.norm() <= 1e-10);
        CHECK(real_norm(d.h1 - w.v1) <= 1e-10);
        CHECK(real_norm(d.h2 - w.v2) <= 1e-10);
    }

    SUBCASE("reassembly round-trips") {
        for (int rep = 0; rep < 10; ++rep) {
            const ProductTangent w = acs.random_tangent(q, rng);
            const Decomposition d = acs.decompose(q, w);
            const CVec r1 = d.h1 + acs.split1(q.p1).vertical_from_coords(d.a);
            const CVec r2 = d.h2 + acs.split2(q.p2).vertical_from_coords(d.b);
            CHECK(real_norm(r1 - w.v1) <= 1e-9 * std::max(1.0, w.norm()));
            CHECK(real_norm(r2 - w.v2) <= 1e-9 * std::max(1.0, w.norm()));
        }
    }
}

TEST_CASE("J exchanges verticals with the stated signs") {
    const GalleryInstance inst = parse_instance("sphere:1,2");
    const ProductACS& acs = *inst.acs;
    Rng rng(43);
    const ProductPoint q = acs.sample_point(rng);
    const LieAlg xi = LieAlg::torus(RVec::Ones(1));

    const ProductTangent xi_n1 = generator_pair(acs, xi, q, 1);
    const ProductTangent xi_n2 = generator_pair(acs, xi, q, 2);

    const ProductTangent j1 = acs.apply_J(q, xi_n1);
    CHECK(real_norm(j1.v1) <= 1e-12);
    CHECK(real_norm(j1.v2 - xi_n2.v2) <= 1e-12);

    const ProductTangent j2 = acs.apply_J(q, xi_n2);
    CHECK(real_norm(j2.v1 + xi_n1.v1) <= 1e-12);
    CHECK(real_norm(j2.v2) <= 1e-12);

    SUBCASE("horizontal vectors are multiplied by i") {
        ProductTangent w{acs.split1(q.p1).project_horizontal(rng.gaussian_cvec(q.p1.size())),
                         acs.split2(q.p2).project_horizontal(rng.gaussian_cvec(q.p2.size()))};
        const ProductTangent jw = acs.apply_J(q, w);
        CHECK(real_norm(jw.v1 - kI * w.v1) <= 1e-10);
        CHECK(real_norm(jw.v2 - kI * w.v2) <= 1e-10);
    }

    SUBCASE("pure vertical J^2 = -id follows from the two transfer rules") {
        const ProductTangent jj = acs.apply_J(q, acs.apply_J(q, xi_n1));
        CHECK(real_norm(jj.v1 + xi_n1.v1) <= 1e-12);
        CHECK(real_norm(jj.v2) <= 1e-12);
    }
}

TEST_CASE("J squares to minus the identity") {
    Rng rng(47);
    for (const char* name : {"sphere:1,2", "stiefel:2,4"}) {
        const GalleryInstance inst = parse_instance(name);
        for (int rep = 0; rep < 4; ++rep) {
            const ProductPoint q = inst.acs->sample_point(rng);
            CHECK(inst.acs->check_J_squared(q, 25, rng) <= 1e-9);
        }
    }
}

TEST_CASE("J does not depend on the algebra basis") {
    const GalleryInstance inst = parse_instance("stiefel:2,4");
    Rng rng(53);
    const GroupElement u = random_element(inst.acs->factor1().group(), rng);
    std::vector<LieAlg> conjugated;
    for (const LieAlg& xi : algebra_basis(inst.acs->factor1().group()))
        conjugated.push_back(LieAlg::unitary(u.u * xi.xi * u.u.adjoint()));
    const ProductACS other(inst.acs->factor1(), inst.acs->factor2(), conjugated);

    for (int rep = 0; rep < 5; ++rep) {
        const ProductPoint q = inst.acs->sample_point(rng);
        const ProductTangent w = inst.acs->random_tangent(q, rng);
        const ProductTangent a = inst.acs->apply_J(q, w);
        const ProductTangent b = other.apply_J(q, w);
        CHECK((a - b).norm() <= 1e-9 * std::max(1.0, w.norm()));
    }
}

TEST_CASE("J preserves the product metric when the factor Gram matrices agree") {
    Rng rng(59);
    for (const char* name : {"sphere:1,2", "stiefel:2,4"}) {
        const GalleryInstance inst = parse_instance(name);
        const ProductPoint q = inst.acs->sample_point(rng);
        const RMat g1 = split(inst.acs->factor1(), q.p1).gram;
        const RMat g2 = split(inst.acs->factor2(), q.p2).gram;
        REQUIRE((g1 - g2).norm() <= 1e-12);  // same group, same level geometry
        for (int rep = 0; rep < 10; ++rep) {
            const ProductTangent w = inst.acs->random_tangent(q, rng);
            const ProductTangent jw = inst.acs->apply_J(q, w);
            CHECK(jw.norm() == doctest::Approx(w.norm()).epsilon(1e-10));
        }
    }
}
