#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace kred {

using Cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

constexpr Cplx kI{0.0, 1.0};
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

/// Deterministic RNG: mt19937_64 plus hand-rolled uniform/Box-Muller so that
/// streams are reproducible byte-for-byte on one platform for a fixed seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    int uniform_int(int n) { return static_cast<int>(uniform() * n) % n; }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double a = kTwoPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Cplx cgaussian() {
        double re = gaussian();
        return {re, gaussian()};
    }

    CVec gaussian_cvec(int n) {
        CVec v(n);
        for (int j = 0; j < n; ++j) v[j] = cgaussian();
        return v;
    }

    RVec gaussian_rvec(int n) {
        RVec v(n);
        for (int j = 0; j < n; ++j) v[j] = gaussian();
        return v;
    }

    /// Derived stream for a named sub-task (splitmix64 over seed ^ salt).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Hermitian product with conjugation on the second slot: h(a,b) = sum_j a_j conj(b_j).
/// For matrix-shaped data (flattened) this equals Tr(A B^dagger).
inline Cplx hermitian_dot(const CVec& a, const CVec& b) {
    return b.dot(a);  // Eigen conjugates its first argument
}

/// Riemannian part g = Re h; this is the Euclidean dot on the realification.
inline double real_dot(const CVec& a, const CVec& b) { return hermitian_dot(a, b).real(); }

inline double real_norm(const CVec& a) { return std::sqrt(real_dot(a, a)); }

/// Stacks [Re; Im] so that real_dot above equals the standard dot product.
inline RVec realify(const CVec& v) {
    RVec r(2 * v.size());
    r.head(v.size()) = v.real();
    r.tail(v.size()) = v.imag();
    return r;
}

inline CVec unrealify(const RVec& r) {
    const auto m = r.size() / 2;
    CVec v(m);
    v.real() = r.head(m);
    v.imag() = r.tail(m);
    return v;
}

/// Modified Gram-Schmidt with one reorthogonalization pass, real coefficients,
/// metric = real_dot. Vectors whose residual drops below drop_tol * original
/// norm are discarded (they were dependent on the span so far).
inline std::vector<CVec> orthonormalize(const std::vector<CVec>& vs, double drop_tol = 1e-10) {
    std::vector<CVec> frame;
    frame.reserve(vs.size());
    for (const CVec& v0 : vs) {
        CVec v = v0;
        const double n0 = real_norm(v);
        if (n0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const CVec& f : frame) v -= real_dot(f, v) * f;
        const double n1 = real_norm(v);
        if (n1 <= drop_tol * n0) continue;
        frame.push_back(v / n1);
    }
    return frame;
}

struct KernelBasis {
    std::vector<CVec> vectors;  // orthonormal basis of ker(D) pulled back to complex storage
    double sigma_min_row = 0.0; // smallest nonzero singular value (regularity margin)
    double sigma_max = 0.0;
};

/// Kernel of a real matrix acting on the realification. rows = constraints,
/// cols = 2m. Requires the row rank to equal `expected_rank`; otherwise the
/// level point is singular.
inline KernelBasis real_kernel(const RMat& D, int expected_rank) {
    Eigen::JacobiSVD<RMat> svd(D, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    const double rank_tol = std::max(1e-12 * smax, 1e-300);
    int rank = 0;
    for (int j = 0; j < sv.size(); ++j)
        if (sv[j] > rank_tol) ++rank;
    if (rank != expected_rank) throw std::runtime_error("singular level point");
    KernelBasis out;
    out.sigma_max = smax;
    out.sigma_min_row = sv[rank - 1];
    const auto cols = D.cols();
    out.vectors.reserve(cols - rank);
    for (int j = rank; j < cols; ++j) out.vectors.push_back(unrealify(svd.matrixV().col(j)));
    return out;
}

/// Bitwise hash of a complex vector, for memo keys.
inline std::uint64_t hash_bits(const CVec& v) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    const auto* p = reinterpret_cast<const std::uint64_t*>(v.data());
    for (Eigen::Index j = 0; j < 2 * v.size(); ++j) {
        h ^= p[j];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace kred
