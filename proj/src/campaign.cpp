#include "kred/campaign.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace kred {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kCheckNames[] = {"j-squared", "nijenhuis", "holomorphy", "equivariance", "lattice", "charts"};

int check_salt(const std::string& name) {
    int salt = 1;
    for (const char* c : kCheckNames) {
        if (name == c) return salt;
        ++salt;
    }
    throw std::invalid_argument("unknown check: " + name);
}

ordered_json point_json(const ProductPoint& q) {
    auto vec = [](const CVec& v) {
        ordered_json arr = ordered_json::array();
        for (int j = 0; j < v.size(); ++j) arr.push_back({v[j].real(), v[j].imag()});
        return arr;
    };
    return {{"p1", vec(q.p1)}, {"p2", vec(q.p2)}};
}

ordered_json matrix_json(const CMat& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

std::string rational_str(const Rational& r) {
    return r.is_integer() ? std::to_string(r.num) : std::to_string(r.num) + "/" + std::to_string(r.den);
}

ordered_json rat_point_json(const RatPoint& z) {
    return {{"a", rational_str(z.a)}, {"b", rational_str(z.b)}, {"value", {z.value().real(), z.value().imag()}}};
}

struct RowSink {
    CheckResult* result;
    ordered_json* details;
    const GalleryInstance* instance;

    void push(int index, double residual, double threshold, bool floor, const ProductPoint* q,
              ordered_json extra = {}) {
        SampleRow row;
        row.check = result->check;
        row.index = index;
        row.residual = residual;
        row.threshold = threshold;
        row.floor = floor;
        row.pass = floor ? residual >= threshold : residual <= threshold;
        result->rows.push_back(row);
        result->max_residual = std::max(result->max_residual, residual);
        if (!row.pass && !details->contains("witness")) {
            ordered_json w;
            w["sample_index"] = index;
            w["residual"] = residual;
            if (q != nullptr) w["point"] = point_json(*q);
            if (!extra.is_null() && !extra.empty()) w["data"] = extra;
            (*details)["witness"] = w;
        }
        if (!row.pass) result->pass = false;
    }
};

LieAlg random_sampled_vertical(const GalleryInstance& inst, Rng& rng) {
    const GroupSpec& G = inst.acs->factor1().group();
    if (G.kind == GroupSpec::Kind::torus) {
        RVec theta = RVec::Zero(G.dim());
        for (const LieAlg& xi : inst.sampling_algebra) theta += rng.gaussian() * xi.theta;
        return LieAlg::torus(std::move(theta));
    }
    CMat m = CMat::Zero(G.k, G.k);
    for (const LieAlg& xi : inst.sampling_algebra) m += rng.gaussian() * xi.xi;
    return LieAlg::unitary(std::move(m));
}

VectorFieldSpec random_horizontal_field(const GalleryInstance& inst, const ProductPoint& q, int factor,
                                        Rng& rng) {
    const Splitting& s = factor == 1 ? inst.acs->split1(q.p1) : inst.acs->split2(q.p2);
    const CVec u = s.project_horizontal(rng.gaussian_cvec(s.base.size()));
    return VectorFieldSpec::projected_constant(u, factor);
}

void run_j_squared(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double tol = cfg.tol("j_squared", 1e-9);
    ProductPoint q = inst.acs->sample_point(rng);
    for (int s = 0; s < cfg.samples; ++s) {
        if (s > 0 && s % 25 == 0) q = inst.acs->sample_point(rng);
        const ProductTangent w = inst.acs->random_tangent(q, rng);
        const double nw = w.norm();
        if (nw < 1e-12) continue;
        const ProductTangent jj = inst.acs->apply_J(q, inst.acs->apply_J(q, w));
        sink.push(s, (jj + w).norm() / nw, tol, false, &q);
    }
}

void run_nijenhuis_abelian(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double tol = cfg.tol("nijenhuis_vanish", 1e-5);
    const BracketConfig bc;
    ProductPoint q = inst.acs->sample_point(rng);
    for (int s = 0; s < cfg.samples; ++s) {
        if (s > 0 && s % 4 == 0) q = inst.acs->sample_point(rng);
        const int kase = s % 5;
        VectorFieldSpec X = VectorFieldSpec::generator_field(random_sampled_vertical(inst, rng), 1);
        VectorFieldSpec Y = VectorFieldSpec::generator_field(random_sampled_vertical(inst, rng), 2);
        const bool has_horizontal = inst.acs->split1(q.p1).horizontal_dim() > 0;
        switch (kase) {
            case 0: break;  // vertical x vertical, crossed factors
            case 1:         // vertical x vertical, same factor
                Y = VectorFieldSpec::generator_field(random_sampled_vertical(inst, rng), 1);
                break;
            case 2:  // horizontal x vertical, same factor
                if (has_horizontal) X = random_horizontal_field(inst, q, 1, rng);
                break;
            case 3:  // horizontal x vertical, crossed
                if (has_horizontal) X = random_horizontal_field(inst, q, 2, rng);
                break;
            case 4:  // horizontal x horizontal
                if (has_horizontal) {
                    X = random_horizontal_field(inst, q, 1, rng);
                    Y = random_horizontal_field(inst, q, 2, rng);
                }
                break;
        }
        const ProductTangent n = nijenhuis_tensor(*inst.acs, X, Y, q, bc);
        sink.push(s, n.norm(), tol, false, &q, {{"case", kase}});
    }
}

void run_nijenhuis_nonabelian(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double match_tol = cfg.tol("oracle_match", 1e-5);
    const double floor = cfg.tol("nijenhuis_floor", 0.1);
    const double vanish_tol = cfg.tol("nijenhuis_vanish", 1e-5);
    const BracketConfig bc;
    const int k = inst.acs->factor1().group().k;
    CMat xi = CMat::Zero(k, k), eta = CMat::Zero(k, k);
    xi(0, 1) = 1.0;
    xi(1, 0) = -1.0;
    eta(0, 1) = kI;
    eta(1, 0) = kI;
    (*sink.details)["designated_pair"] = {{"xi", matrix_json(xi)}, {"eta", matrix_json(eta)}};

    const VectorFieldSpec Y1 = VectorFieldSpec::generator_field(LieAlg::unitary(xi), 1);
    const VectorFieldSpec Y2 = VectorFieldSpec::generator_field(LieAlg::unitary(eta), 2);
    int idx = 0;
    for (int rep = 0; rep < 3; ++rep) {
        const ProductPoint q = inst.acs->sample_point(rng);
        const ProductTangent fd = nijenhuis_tensor(*inst.acs, Y1, Y2, q, bc);
        const ProductTangent oracle = vertical_oracle(*inst.acs, LieAlg::unitary(xi), LieAlg::unitary(eta), q);
        sink.push(idx++, (fd - oracle).norm(), match_tol, false, &q);
        sink.push(idx++, fd.norm(), floor, true, &q);
    }
    ProductPoint q = inst.acs->sample_point(rng);
    for (; idx < cfg.samples; ++idx) {
        if (idx % 4 == 0) q = inst.acs->sample_point(rng);
        const int f_h = 1 + (idx % 2), f_v = 1 + ((idx / 2) % 2);
        const VectorFieldSpec X = random_horizontal_field(inst, q, f_h, rng);
        const VectorFieldSpec Y =
            VectorFieldSpec::generator_field(random_algebra(inst.acs->factor1().group(), rng), f_v);
        const ProductTangent n = nijenhuis_tensor(*inst.acs, X, Y, q, bc);
        sink.push(idx, n.norm(), vanish_tol, false, &q, {{"case", "mixed"}});
    }
}

void run_holomorphy(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double tol = cfg.tol("holomorphy", 1e-8);
    const PsiAction psi = inst.psi(cfg.mixing);
    ProductPoint q = inst.acs->sample_point(rng);
    for (int s = 0; s < cfg.samples; ++s) {
        if (s > 0 && s % 4 == 0) q = inst.acs->sample_point(rng);
        const Cplx z{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        double residual;
        if (s % 2 == 0)
            residual = check_orbit_holomorphy(psi, q, z);
        else
            residual = check_translation_holomorphy(psi, z, q, 4, inst.holomorphy_algebra, rng);
        sink.push(s, residual, tol, false, &q,
                  {{"part", s % 2 == 0 ? "orbit" : "translation"}, {"z", {z.real(), z.imag()}}});
    }
}

void run_equivariance(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double tol = cfg.tol("equivariance", 1e-12);
    for (int s = 0; s < cfg.samples; ++s) {
        const ProductPoint q = inst.acs->sample_point(rng);
        const GroupElement g1 = random_element(inst.acs->factor1().group(), rng);
        const GroupElement g2 = random_element(inst.acs->factor2().group(), rng);
        const double r1 = check_equivariance(inst.acs->factor1().moment, q.p1, g1);
        const double r2 = check_equivariance(inst.acs->factor2().moment, q.p2, g2);
        sink.push(s, std::max(r1, r2), tol, false, &q);
    }
}

void run_lattice(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double fix_tol = cfg.tol("lattice_fix", 1e-12);
    const double move_floor = cfg.tol("lattice_move_floor", 1e-3);
    const PsiAction psi = inst.psi(cfg.mixing);
    const LatticeClaimReport claim = check_paper_lattice_claim(cfg.mixing);
    const Lattice2D& L = claim.computed;

    const long long det = static_cast<long long>(cfg.mixing(0, 0)) * cfg.mixing(1, 1) -
                          static_cast<long long>(cfg.mixing(0, 1)) * cfg.mixing(1, 0);
    ordered_json lat;
    lat["mixing"] = {{cfg.mixing(0, 0), cfg.mixing(0, 1)}, {cfg.mixing(1, 0), cfg.mixing(1, 1)}};
    lat["generators"] = {rat_point_json(L.g1), rat_point_json(L.g2)};
    lat["covolume"] = rational_str(L.covolume);
    lat["covolume_times_abs_det_is_one"] = (L.covolume * Rational(std::llabs(det)) == Rational(1));
    lat["p"] = claim.p;
    lat["claim_half"] = {{"contained", claim.half_contained}, {"equal", claim.half_equal}};
    if (claim.half_witness) lat["claim_half"]["witness"] = rat_point_json(*claim.half_witness);
    lat["claim_p"] = {{"contained", claim.p_contained}, {"equal", claim.p_equal}};
    if (claim.p_witness) lat["claim_p"]["witness"] = rat_point_json(*claim.p_witness);
    (*sink.details)["lattice"] = lat;

    for (int s = 0; s < cfg.samples; ++s) {
        const ProductPoint q = inst.acs->sample_point(rng);
        if (s % 2 == 0) {
            double worst = 0.0;
            for (const Cplx lambda : {L.generator1(), L.generator2()}) {
                const ProductPoint moved = psi.apply(lambda, q);
                worst = std::max(worst, std::sqrt((moved.p1 - q.p1).squaredNorm() +
                                                  (moved.p2 - q.p2).squaredNorm()));
            }
            sink.push(s, worst, fix_tol, false, &q, {{"kind", "generator-fix"}});
        } else {
            Cplx z;
            do {
                z = L.reduce(Cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
            } while (std::abs(z) < 0.05);
            const ProductPoint moved = psi.apply(z, q);
            const double movement =
                std::sqrt((moved.p1 - q.p1).squaredNorm() + (moved.p2 - q.p2).squaredNorm());
            sink.push(s, movement, move_floor, true, &q, {{"kind", "off-lattice-move"}, {"z", {z.real(), z.imag()}}});
        }
    }
}

void run_charts(const GalleryInstance& inst, const CampaignConfig& cfg, RowSink& sink, Rng& rng) {
    const double min_sv = cfg.tol("charts_min_singular", 1e-3);
    const double lin_tol = cfg.tol("charts_linearity", 1e-5);
    const double trans_tol = cfg.tol("charts_transition", 1e-8);
    const PsiAction psi = inst.psi(cfg.mixing);
    const ProductPoint base = inst.acs->sample_point(rng);
    const ChartMap chart_a = ChartMap::make(psi, base.p1, base.p2, 0.5);

    // Second chart: when the horizontal spaces plus the circle orbit fill the
    // level tangent (vertical rank 1 per factor), offset the slice bases
    // horizontally, which makes h(p) vary over the overlap. With a larger
    // vertical rank the chart parameterizes a proper submanifold and two
    // horizontally offset slices would not share orbits at all; rotating the
    // bases along the circle keeps the overlap full and makes h constant.
    CVec b1 = base.p1, b2 = base.p2;
    const bool circle_fills_vertical = inst.acs->split1(base.p1).vertical_dim() == 1;
    if (circle_fills_vertical && chart_a.s1.dim() > 0) {
        b1 = inst.acs->factor1().retract_point(base.p1, 0.15 * (chart_a.s1.frame[0] + chart_a.s1.frame[1]));
        b2 = inst.acs->factor2().retract_point(base.p2, 0.15 * (chart_a.s2.frame[0] + chart_a.s2.frame[1]));
    } else if (!circle_fills_vertical) {
        b1 = act(inst.acs->factor1().group(), inst.acs->factor1().ambient(),
                 inst.circle.element(inst.acs->factor1().group(), 0.2), base.p1);
        b2 = act(inst.acs->factor2().group(), inst.acs->factor2().ambient(),
                 inst.circle.element(inst.acs->factor2().group(), 0.2), base.p2);
    }
    const ChartMap chart_b = ChartMap::make(psi, b1, b2, 0.5);

    const LocalDiffeoReport diffeo = check_local_diffeo(chart_a, 3, rng);
    (*sink.details)["rank_base"] = diffeo.rank_base;
    (*sink.details)["domain_dim"] = chart_a.domain_dim();
    (*sink.details)["min_singular_sampled"] = diffeo.min_singular_sampled;
    sink.push(0, diffeo.min_singular_base, min_sv, true, &base, {{"kind", "min-singular-base"}});

    sink.push(1, check_phi_complex_linear(chart_a, 5, rng), lin_tol, false, &base, {{"kind", "complex-linearity"}});

    const int grid_n = chart_a.s1.dim() > 0 ? 5 : 1;
    const TransitionReport tr = transition_function(chart_a, chart_b, grid_n, 0.1, 10, rng);
    sink.push(2, tr.max_round_trip, trans_tol, false, &base, {{"kind", "transition-round-trip"}});
    sink.push(3, tr.max_g_dependence, trans_tol, false, &base, {{"kind", "transition-g-independence"}});
    (*sink.details)["transition"] = {{"grid_spacing", tr.grid_spacing},
                                     {"max_neighbor_jump", tr.max_neighbor_jump},
                                     {"lipschitz_estimate",
                                      tr.grid_spacing > 0 ? tr.max_neighbor_jump / tr.grid_spacing : 0.0}};

    // chart consistency: apply then invert recovers the coordinates
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
        RVec t1 = rng.gaussian_rvec(chart_a.s1.dim()), t2 = rng.gaussian_rvec(chart_a.s2.dim());
        if (t1.size() > 0 && t1.norm() > 0) t1 *= 0.05 / t1.norm();
        if (t2.size() > 0 && t2.norm() > 0) t2 *= 0.05 / t2.norm();
        const Cplx z = chart_a.lattice.reduce({rng.uniform(), rng.uniform()});
        const auto inv = chart_a.invert(chart_a.apply(t1, t2, z));
        const double err = std::max({(inv.t1 - t1).norm(), (inv.t2 - t2).norm(),
                                     chart_a.lattice.distance_mod(inv.z, z)});
        worst = std::max(worst, err);
    }
    sink.push(4, worst, cfg.tol("charts_inversion", 1e-7), false, &base, {{"kind", "inversion-round-trip"}});
}

}  // namespace

const std::vector<std::string>& check_catalog() {
    static const std::vector<std::string> names(std::begin(kCheckNames), std::end(kCheckNames));
    return names;
}

CampaignConfig CampaignConfig::from_json_text(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    CampaignConfig cfg;
    if (j.contains("instance")) cfg.instance = j.at("instance").get<std::string>();
    if (j.contains("checks")) cfg.checks = j.at("checks").get<std::vector<std::string>>();
    if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerances"))
        for (const auto& [key, value] : j.at("tolerances").items()) {
            const double tol = value.get<double>();
            if (!(tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
            cfg.tolerances[key] = tol;
        }
    if (j.contains("mixing")) {
        const auto m = j.at("mixing");
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) cfg.mixing(r, c) = m.at(r).at(c).get<int>();
    }
    if (j.contains("out_report")) cfg.out_report = j.at("out_report").get<std::string>();
    if (j.contains("out_csv")) cfg.out_csv = j.at("out_csv").get<std::string>();
    if (cfg.samples <= 0) throw std::invalid_argument("samples must be positive");
    return cfg;
}

CampaignConfig CampaignConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

Report run_campaign(const CampaignConfig& config) {
    Report report;
    report.config = config;
    const GalleryInstance inst = parse_instance(config.instance);
    report.instance_name = inst.name;

    std::vector<std::string> selected;
    for (const std::string& name : config.checks) {
        if (name == "all") {
            for (const char* c : kCheckNames) selected.push_back(c);
        } else {
            check_salt(name);  // validates
            selected.push_back(name);
        }
    }

    for (const std::string& name : selected) {
        CheckResult result;
        result.check = name;
        ordered_json details;
        RowSink sink{&result, &details, &inst};
        Rng rng(Rng::derive(config.seed, static_cast<std::uint64_t>(check_salt(name))));
        const auto t0 = std::chrono::steady_clock::now();
        if (name == "j-squared") {
            run_j_squared(inst, config, sink, rng);
        } else if (name == "nijenhuis") {
            if (inst.abelian)
                run_nijenhuis_abelian(inst, config, sink, rng);
            else
                run_nijenhuis_nonabelian(inst, config, sink, rng);
        } else if (name == "holomorphy") {
            run_holomorphy(inst, config, sink, rng);
        } else if (name == "equivariance") {
            run_equivariance(inst, config, sink, rng);
        } else if (name == "lattice") {
            run_lattice(inst, config, sink, rng);
        } else if (name == "charts") {
            run_charts(inst, config, sink, rng);
        }
        const auto t1 = std::chrono::steady_clock::now();
        result.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        result.samples = static_cast<int>(result.rows.size());
        result.details_json = details.dump();
        report.all_pass = report.all_pass && result.pass;
        report.results.push_back(std::move(result));
    }
    return report;
}

std::string csv_text(const Report& report) {
    std::string out = "check,instance,sample_index,residual,threshold,pass\n";
    for (const CheckResult& result : report.results)
        for (const SampleRow& row : result.rows) {
            out += row.check;
            out += ",\"";  // instance names contain commas
            out += report.instance_name;
            out += "\",";
            out += std::to_string(row.index);
            out += ',';
            out += format_g17(row.residual);
            out += ',';
            out += format_g17(row.threshold);
            out += ',';
            out += row.pass ? "1" : "0";
            out += '\n';
        }
    return out;
}

std::string report_json_text(const Report& report) {
    ordered_json j;
    j["config"] = {{"instance", report.config.instance},
                   {"checks", report.config.checks},
                   {"samples", report.config.samples},
                   {"seed", report.config.seed},
                   {"mixing",
                    {{report.config.mixing(0, 0), report.config.mixing(0, 1)},
                     {report.config.mixing(1, 0), report.config.mixing(1, 1)}}}};
    ordered_json tols = ordered_json::object();
    for (const auto& [key, value] : report.config.tolerances) tols[key] = value;
    j["config"]["tolerances"] = tols;
    j["instance"] = report.instance_name;
    ordered_json results = ordered_json::array();
    for (const CheckResult& result : report.results) {
        ordered_json r;
        r["check"] = result.check;
        r["status"] = result.pass ? "pass" : "fail";
        r["max_residual"] = result.max_residual;
        r["samples"] = result.samples;
        r["wall_ms"] = result.wall_ms;
        r["details"] = ordered_json::parse(result.details_json);
        results.push_back(std::move(r));
    }
    j["results"] = results;
    j["all_pass"] = report.all_pass;
    return j.dump(2) + "\n";
}

std::string resolve_output_path(const std::string& path, const std::string& fallback_name) {
    namespace fs = std::filesystem;
    const char* env = std::getenv("KRED_OUT_DIR");
    const fs::path outdir = env != nullptr ? fs::path(env) : fs::path(".");
    fs::path p = path.empty() ? fs::path(fallback_name) : fs::path(path);
    if (p.is_absolute()) return p.string();
    return (outdir / p).string();
}

Report run_campaign_to_files(const CampaignConfig& config) {
    Report report = run_campaign(config);
    const std::string csv_path = resolve_output_path(config.out_csv, "residuals.csv");
    const std::string report_path = resolve_output_path(config.out_report, "report.json");
    for (const auto& [path, text] : {std::pair{csv_path, csv_text(report)}, {report_path, report_json_text(report)}}) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file: " + path);
        out << text;
    }
    return report;
}

}  // namespace kred
