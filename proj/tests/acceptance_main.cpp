// Acceptance suite: every release criterion at its contracted tolerance,
// one pass/fail line per criterion. Exit code = number of failed criteria.

#include "kred/campaign.hpp"

#include <cstdio>
#include <functional>
#include <string>

using namespace kred;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-52s %s\n", pass ? "PASS" : "FAIL", number, label.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "max residual %.3e", x);
    return buf;
}

double campaign_max_residual(const std::string& instance, const std::string& check, int samples, bool* pass,
                             Eigen::Matrix2i mixing = PsiAction::default_mixing()) {
    CampaignConfig cfg;
    cfg.instance = instance;
    cfg.checks = {check};
    cfg.samples = samples;
    cfg.seed = 2024;
    cfg.mixing = mixing;
    const Report rep = run_campaign(cfg);
    *pass = *pass && rep.all_pass;
    return rep.results.at(0).max_residual;
}

LieAlg designated_xi() {
    CMat m = CMat::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = -1.0;
    return LieAlg::unitary(std::move(m));
}

LieAlg designated_eta() {
    CMat m = CMat::Zero(2, 2);
    m(0, 1) = kI;
    m(1, 0) = kI;
    return LieAlg::unitary(std::move(m));
}

void c1_almost_complex() {
    bool pass = true;
    double worst = 0.0;
    for (const char* name : {"sphere:1,2", "stiefel:2,4"})
        worst = std::max(worst, campaign_max_residual(name, "j-squared", 100, &pass));
    pass = pass && worst <= 1e-9;
    criterion(1, "J^2 = -id on sphere:1,2 and stiefel:2,4 (1e-9)", pass, fmt(worst));
}

void c2_abelian_vanishing() {
    bool pass = true;
    double worst = 0.0;
    for (const char* name : {"sphere:1,2", "stiefel-torus:2,4,2"})
        worst = std::max(worst, campaign_max_residual(name, "nijenhuis", 200, &pass));
    pass = pass && worst <= 1e-5;
    criterion(2, "abelian instances: ||N_J|| <= 1e-5 over 200 draws", pass, fmt(worst));
}

void c3_nonabelian_nonvanishing() {
    const GalleryInstance inst = parse_instance("stiefel:2,4");
    Rng rng(31337);
    const LieAlg xi = designated_xi(), eta = designated_eta();
    double worst_match = 0.0, min_norm = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        const ProductPoint q = inst.acs->sample_point(rng);
        const ProductTangent fd = nijenhuis_tensor(*inst.acs, VectorFieldSpec::generator_field(xi, 1),
                                                   VectorFieldSpec::generator_field(eta, 2), q);
        const ProductTangent oracle = vertical_oracle(*inst.acs, xi, eta, q);
        worst_match = std::max(worst_match, (fd - oracle).norm());
        min_norm = std::min(min_norm, fd.norm());
    }
    const bool pass = worst_match <= 1e-5 && min_norm >= 0.1;
    char buf[96];
    std::snprintf(buf, sizeof buf, "oracle gap %.3e, ||N_J|| >= %.3f", worst_match, min_norm);
    criterion(3, "U(2) designated pair: matches the closed form, >= 0.1", pass, buf);
}

void c4_mixed_vanishing() {
    const GalleryInstance inst = parse_instance("stiefel:2,4");
    Rng rng(271828);
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        const ProductPoint q = inst.acs->sample_point(rng);
        for (int f_h : {1, 2})
            for (int f_v : {1, 2}) {
                const Splitting& s = f_h == 1 ? inst.acs->split1(q.p1) : inst.acs->split2(q.p2);
                const CVec u = s.project_horizontal(rng.gaussian_cvec(s.base.size()));
                const VectorFieldSpec x = VectorFieldSpec::projected_constant(u, f_h);
                const VectorFieldSpec y =
                    VectorFieldSpec::generator_field(f_v == 1 ? designated_xi() : designated_eta(), f_v);
                worst = std::max(worst, nijenhuis_tensor(*inst.acs, x, y, q).norm());
            }
    }
    criterion(4, "horizontal-vertical pairs vanish on stiefel:2,4 (1e-5)", worst <= 1e-5, fmt(worst));
}

void c5_equivariance() {
    bool pass = true;
    const double worst = campaign_max_residual("stiefel:2,4", "equivariance", 100, &pass);
    pass = pass && worst <= 1e-12;
    criterion(5, "momentum equivariance over 100 (A, u) pairs (1e-12)", pass, fmt(worst));
}

void c6_holomorphy() {
    bool pass = true;
    double worst = 0.0;
    for (const char* name : {"sphere:1,2", "stiefel-torus:2,4,1"})
        worst = std::max(worst, campaign_max_residual(name, "holomorphy", 100, &pass));
    pass = pass && worst <= 1e-8;
    criterion(6, "orbit and translation holomorphy (1e-8)", pass, fmt(worst));
}

void c7_period_lattice() {
    bool pass = true;
    std::string detail;

    Eigen::Matrix2i A;
    A << 1, 1, 1, -1;
    const Lattice2D L = period_lattice(A);
    // generators must have integer coordinates in the basis {(1+i)/2, (1-i)/2}
    // and span it (covolume matches), giving lattice equality
    for (const RatPoint& g : {L.g1, L.g2})
        pass = pass && (g.a + g.b).is_integer() && (g.a - g.b).is_integer();
    pass = pass && L.covolume == Rational(1, 2);

    const LatticeClaimReport claim = check_paper_lattice_claim(A);
    pass = pass && !claim.half_contained && claim.half_witness.has_value() &&
           claim.half_witness->a == Rational(1, 2) && claim.half_witness->b == Rational(0);

    // brute-force stabilizer scan on the (Z/24)^2 grid against exact membership
    const GalleryInstance inst = parse_instance("sphere:1,1");
    PsiAction psi = inst.psi(A);
    Rng rng(55);
    const ProductPoint q = inst.acs->sample_point(rng);
    for (int i = -24; i <= 24 && pass; ++i)
        for (int j = -24; j <= 24 && pass; ++j) {
            const RatPoint z{Rational(i, 24), Rational(j, 24)};
            const ProductPoint moved = psi.apply(z.value(), q);
            const bool fixes =
                std::sqrt((moved.p1 - q.p1).squaredNorm() + (moved.p2 - q.p2).squaredNorm()) <= 1e-9;
            pass = pass && fixes == lattice_contains(A, z);
        }

    int tested = 0;
    while (tested < 10) {
        Eigen::Matrix2i B;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) B(r, c) = rng.uniform_int(9) - 4;
        const long long det = static_cast<long long>(B(0, 0)) * B(1, 1) - static_cast<long long>(B(0, 1)) * B(1, 0);
        if (det == 0 || std::llabs(det) > 12) continue;
        ++tested;
        pass = pass && period_lattice(B).covolume * Rational(std::llabs(det)) == Rational(1);
    }
    criterion(7, "period lattice exact: generators, covolume, witness 1/2", pass,
              "covolume 1/2, witness 1/2, 10 random dets");
}

void c8_charts() {
    const GalleryInstance inst = parse_instance("sphere:1,2");
    const PsiAction psi = inst.psi();
    Rng rng(99);
    const ProductPoint base = inst.acs->sample_point(rng);
    const ChartMap ca = ChartMap::make(psi, base.p1, base.p2, 0.5);
    const CVec b1 = inst.acs->factor1().retract_point(base.p1, 0.15 * (ca.s1.frame[0] + ca.s1.frame[1]));
    const CVec b2 = inst.acs->factor2().retract_point(base.p2, 0.15 * (ca.s2.frame[0] + ca.s2.frame[1]));
    const ChartMap cb = ChartMap::make(psi, b1, b2, 0.5);

    const LocalDiffeoReport diffeo = check_local_diffeo(ca, 3, rng);
    const double lin = check_phi_complex_linear(ca, 6, rng);
    const TransitionReport tr = transition_function(ca, cb, 5, 0.1, 10, rng);
    double max_h = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) max_h = std::max(max_h, std::abs(tr.h_values(i, j)));

    const bool pass = diffeo.min_singular_base > 1e-3 && diffeo.rank_base == 8 && lin <= 1e-5 &&
                      tr.max_round_trip <= 1e-8 && tr.max_g_dependence <= 1e-8 && max_h > 1e-3;
    char buf[128];
    std::snprintf(buf, sizeof buf, "min sv %.3f, linearity %.2e, transition %.2e/%.2e",
                  diffeo.min_singular_base, lin, tr.max_round_trip, tr.max_g_dependence);
    criterion(8, "charts: rank, dPhi complex-linear, (p, g h(p)) form", pass, buf);
}

void c9_tensoriality_convergence() {
    const GalleryInstance inst = parse_instance("stiefel:2,4");
    Rng rng(424242);
    const ProductPoint q = inst.acs->sample_point(rng);
    const LieAlg xi = designated_xi(), eta = designated_eta();

    const VectorFieldSpec y2 = VectorFieldSpec::generator_field(eta, 2);
    const CVec frozen = generator(inst.acs->factor1().group(), inst.acs->factor1().ambient(), xi, q.p1);
    const ProductTangent a = nijenhuis_tensor(*inst.acs, VectorFieldSpec::generator_field(xi, 1), y2, q);
    const ProductTangent b = nijenhuis_tensor(*inst.acs, VectorFieldSpec::projected_constant(frozen, 1), y2, q);
    const double extension_gap = (a - b).norm();

    const LieAlg z = bracket(inst.acs->factor1().group(), xi, eta);
    const CVec exact = generator(inst.acs->factor1().group(), inst.acs->factor1().ambient(), z, q.p1);
    auto err = [&](double h) {
        BracketConfig cfg;
        cfg.step_scale = h;
        const ProductTangent fd = lie_bracket(*inst.acs, VectorFieldSpec::generator_field(xi, 1),
                                              VectorFieldSpec::generator_field(eta, 1), q, cfg);
        return real_norm(fd.v1 - exact);
    };
    const double slope = std::log2(err(1e-2) / err(5e-3));

    const bool pass = extension_gap <= 2e-5 && slope >= 1.7 && slope <= 2.3;
    char buf[96];
    std::snprintf(buf, sizeof buf, "extension gap %.2e, slope %.2f", extension_gap, slope);
    criterion(9, "tensoriality (2e-5) and bracket order in [1.7, 2.3]", pass, buf);
}

void c10_determinism() {
    CampaignConfig cfg;
    cfg.instance = "sphere:1,2";
    cfg.checks = {"j-squared", "nijenhuis", "holomorphy", "lattice"};
    cfg.samples = 40;
    cfg.seed = 7777;
    const std::string a = csv_text(run_campaign(cfg));
    const std::string b = csv_text(run_campaign(cfg));
    criterion(10, "same seed reproduces byte-identical CSV output", a == b && !a.empty(),
              std::to_string(a.size()) + " bytes");
}

}  // namespace

int main() {
    std::puts("acceptance suite");
    c1_almost_complex();
    c2_abelian_vanishing();
    c3_nonabelian_nonvanishing();
    c4_mixed_vanishing();
    c5_equivariance();
    c6_holomorphy();
    c7_period_lattice();
    c8_charts();
    c9_tensoriality_convergence();
    c10_determinism();
    if (g_failures == 0)
        std::puts("all acceptance criteria met");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
