#include "kred/campaign.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

std::string rational_str(const kred::Rational& r) {
    return r.is_integer() ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string point_str(const kred::RatPoint& z) {
    return rational_str(z.a) + (z.b.num < 0 ? " - " : " + ") + rational_str(z.b.abs()) + "i";
}

int cmd_run(const std::string& config_path) {
    const kred::CampaignConfig cfg = kred::CampaignConfig::from_json_file(config_path);
    const kred::Report report = kred::run_campaign_to_files(cfg);
    for (const kred::CheckResult& r : report.results)
        std::printf("[%s] %-12s max residual %.3e  (%d samples, %.1f ms)\n", r.pass ? "PASS" : "FAIL",
                    r.check.c_str(), r.max_residual, r.samples, r.wall_ms);
    std::printf("campaign %s on %s: %s\n", config_path.c_str(), report.instance_name.c_str(),
                report.all_pass ? "all checks met their contracts" : "contract violations, see report");
    std::printf("csv:    %s\nreport: %s\n", kred::resolve_output_path(cfg.out_csv, "residuals.csv").c_str(),
                kred::resolve_output_path(cfg.out_report, "report.json").c_str());
    return report.all_pass ? 0 : 1;
}

void cmd_list() {
    std::puts("instances (name pattern -> example):");
    std::puts("  sphere:n,m            sphere:1,2        odd spheres with diagonal circle actions");
    std::puts("  stiefel:k,n           stiefel:2,4       complex frame manifolds under U(k)");
    std::puts("  stiefel-torus:k,n,p   stiefel-torus:2,4,1  diagonal p-torus selected inside U(k)");
    std::puts("  calabi-eckmann:n[,T]  calabi-eckmann:1  sphere x truncated Hilbert sphere (default T=25)");
    std::puts("checks:");
    for (const std::string& name : kred::check_catalog()) std::printf("  %s\n", name.c_str());
    std::puts("  all");
}

int cmd_lattice(const std::vector<long long>& args) {
    Eigen::Matrix2i A;
    A << static_cast<int>(args[0]), static_cast<int>(args[1]), static_cast<int>(args[2]),
        static_cast<int>(args[3]);
    const int claim_flag = args.size() > 4 ? static_cast<int>(args[4]) : 1;
    const long long seed = args.size() > 5 ? args[5] : 42;
    const kred::LatticeClaimReport rep = kred::check_paper_lattice_claim(A);
    std::printf("mixing [[%d, %d], [%d, %d]], |det| = %lld\n", A(0, 0), A(0, 1), A(1, 0), A(1, 1), rep.p);
    std::printf("stabilizer lattice generators: %s and %s\n", point_str(rep.computed.g1).c_str(),
                point_str(rep.computed.g2).c_str());
    std::printf("covolume = %s (covolume * |det| = 1: %s)\n", rational_str(rep.computed.covolume).c_str(),
                (rep.computed.covolume * kred::Rational(rep.p) == kred::Rational(1)) ? "yes" : "NO");

    if (claim_flag != 0) {
        auto verdict = [](bool contained, bool equal, const std::optional<kred::RatPoint>& witness) {
            if (equal) return std::string("equal to the stabilizer");
            if (contained) return std::string("contained, not equal");
            return "NOT contained, witness " + point_str(*witness);
        };
        std::printf("half-integer square lattice (Z/2) + i(Z/2):     %s\n",
                    verdict(rep.half_contained, rep.half_equal, rep.half_witness).c_str());
        std::printf("square lattice (Z/p) + i(Z/p) with p = |det| = %lld: %s\n", rep.p,
                    verdict(rep.p_contained, rep.p_equal, rep.p_witness).c_str());
    }

    // numeric spot check of the stabilizer on a small sphere product
    const kred::GalleryInstance inst = kred::parse_instance("sphere:1,1");
    kred::PsiAction psi = inst.psi(A);
    kred::Rng rng(static_cast<std::uint64_t>(seed));
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 20; ++rep_i) {
        const kred::ProductPoint q = inst.acs->sample_point(rng);
        for (const kred::Cplx lambda : {rep.computed.g1.value(), rep.computed.g2.value()}) {
            const kred::ProductPoint moved = psi.apply(lambda, q);
            worst = std::max(worst, std::sqrt((moved.p1 - q.p1).squaredNorm() + (moved.p2 - q.p2).squaredNorm()));
        }
    }
    std::printf("numeric stabilizer residual over 20 sphere samples: %.3e\n", worst);
    return worst <= 1e-12 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification campaigns for product almost-complex structures on momentum level sets"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "execute a campaign from a JSON config");
    run->add_option("config", config_path, "path to the campaign config")->required();

    CLI::App* list = app.add_subcommand("list", "list instances and checks");

    std::vector<long long> lattice_args;
    CLI::App* lattice = app.add_subcommand("lattice", "period lattice of an integer 2x2 mixing matrix");
    lattice
        ->add_option("args", lattice_args,
                     "A11 A12 A21 A22 [claim 0/1] [seed]: matrix entries, claim-check flag, spot-check seed")
        ->expected(4, 6);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (list->parsed()) cmd_list();
        if (lattice->parsed()) return cmd_lattice(lattice_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
