#pragma once

#include "kred/moment.hpp"

#include <memory>
#include <mutex>
#include <unordered_map>

namespace kred {

struct ProductPoint {
    CVec p1, p2;
};

struct ProductTangent {
    CVec v1, v2;

    double norm() const { return std::sqrt(real_dot(v1, v1) + real_dot(v2, v2)); }
};

inline ProductTangent operator+(const ProductTangent& a, const ProductTangent& b) {
    return {a.v1 + b.v1, a.v2 + b.v2};
}
inline ProductTangent operator-(const ProductTangent& a, const ProductTangent& b) {
    return {a.v1 - b.v1, a.v2 - b.v2};
}
inline ProductTangent operator*(double s, const ProductTangent& a) { return {s * a.v1, s * a.v2}; }

/// Result of splitting a product tangent along (H_1 + V_1) + (H_2 + V_2):
/// horizontal parts plus algebra coefficients of the vertical parts.
struct Decomposition {
    CVec h1, h2;
    RVec a, b;
};

/**
 * The product almost complex structure on N1 x N2 for two level sets with
 * the same structure group.
 *
 * On horizontal vectors J acts as multiplication by i. Vertical vectors are
 * exchanged between the factors through their algebra coefficients:
 *
 *     J(gen_xi at p1, 0) = (0, gen_xi at p2)
 *     J(0, gen_xi at p2) = (-gen_xi at p1, 0)
 *
 * The transfer goes through coefficients, never raw entries: the two factors
 * generally live in different ambient spaces.
 *
 * Splittings are memoized per base point (bitwise key); the cache tolerates
 * concurrent readers.
 */
class ProductACS {
public:
    ProductACS(LevelSet n1, LevelSet n2, std::vector<LieAlg> basis)
        : n1_(std::move(n1)), n2_(std::move(n2)), basis_(std::move(basis)) {
        if (n1_.group().kind != n2_.group().kind || n1_.group().dim() != n2_.group().dim())
            throw std::invalid_argument("product factors must share one structure group");
    }

    ProductACS(LevelSet n1, LevelSet n2) : ProductACS(std::move(n1), n2, algebra_basis(n1.group())) {}

    const LevelSet& factor1() const { return n1_; }
    const LevelSet& factor2() const { return n2_; }
    const std::vector<LieAlg>& basis() const { return basis_; }

    const Splitting& split1(const CVec& p1) const { return cached(cache1_, n1_, p1); }
    const Splitting& split2(const CVec& p2) const { return cached(cache2_, n2_, p2); }

    ProductPoint sample_point(Rng& rng) const { return {n1_.sample(rng), n2_.sample(rng)}; }

    ProductTangent project_tangent(const ProductPoint& q, const ProductTangent& w) const {
        const Splitting &s1 = split1(q.p1), &s2 = split2(q.p2);
        return {s1.project_tangent(w.v1), s2.project_tangent(w.v2)};
    }

    ProductTangent random_tangent(const ProductPoint& q, Rng& rng) const {
        ProductTangent w{rng.gaussian_cvec(q.p1.size()), rng.gaussian_cvec(q.p2.size())};
        return project_tangent(q, w);
    }

    Decomposition decompose(const ProductPoint& q, const ProductTangent& w) const {
        const Splitting &s1 = split1(q.p1), &s2 = split2(q.p2);
        Decomposition d;
        d.a = s1.vertical_coordinates(w.v1);
        d.b = s2.vertical_coordinates(w.v2);
        d.h1 = s1.project_horizontal(w.v1);
        d.h2 = s2.project_horizontal(w.v2);
        return d;
    }

    /// J w. The input is tangent-projected first, so finite-difference debris
    /// off the tangent space is shed rather than rotated.
    ProductTangent apply_J(const ProductPoint& q, const ProductTangent& w) const {
        const Splitting &s1 = split1(q.p1), &s2 = split2(q.p2);
        const Decomposition d = decompose(q, project_tangent(q, w));
        ProductTangent out;
        out.v1 = kI * d.h1 - s1.vertical_from_coords(d.b);
        out.v2 = kI * d.h2 + s2.vertical_from_coords(d.a);
        return out;
    }

    /// max over random tangents of ||J(Jw) + w|| / ||w||.
    double check_J_squared(const ProductPoint& q, int samples, Rng& rng) const {
        double worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            const ProductTangent w = random_tangent(q, rng);
            const double nw = w.norm();
            if (nw < 1e-12) continue;
            const ProductTangent jj = apply_J(q, apply_J(q, w));
            worst = std::max(worst, (jj + w).norm() / nw);
        }
        return worst;
    }

private:
    struct CacheSlot {
        CVec point;
        std::shared_ptr<const Splitting> splitting;
    };
    using Cache = std::unordered_map<std::uint64_t, std::vector<CacheSlot>>;

    const Splitting& cached(Cache& cache, const LevelSet& N, const CVec& p) const {
        const std::uint64_t key = hash_bits(p);
        const auto same = [&p](const CacheSlot& slot) {
            return slot.point.size() == p.size() && (slot.point.array() == p.array()).all();
        };
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache.find(key);
            if (it != cache.end())
                for (const CacheSlot& slot : it->second)
                    if (same(slot)) return *slot.splitting;
        }
        auto fresh = std::make_shared<const Splitting>(split(N, p, basis_));
        std::lock_guard<std::mutex> lock(mutex_);
        auto& slots = cache[key];
        for (const CacheSlot& slot : slots)  // another thread may have won the race
            if (same(slot)) return *slot.splitting;
        slots.push_back({p, std::move(fresh)});
        return *slots.back().splitting;
    }

    LevelSet n1_, n2_;
    std::vector<LieAlg> basis_;
    mutable Cache cache1_, cache2_;
    mutable std::mutex mutex_;
};

}  // namespace kred
