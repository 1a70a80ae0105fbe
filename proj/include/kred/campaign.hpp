#pragma once

#include "kred/gallery.hpp"

#include <map>

namespace kred {

/// One verification campaign: an instance, a set of checks, sampling budget,
/// seed and tolerance overrides. A fixed seed reproduces the CSV bytes.
struct CampaignConfig {
    std::string instance = "sphere:1,2";
    std::vector<std::string> checks = {"all"};
    int samples = 200;
    std::uint64_t seed = 42;
    std::map<std::string, double> tolerances;
    Eigen::Matrix2i mixing = PsiAction::default_mixing();
    std::string out_report;  // resolved against KRED_OUT_DIR when relative
    std::string out_csv;

    double tol(const std::string& key, double fallback) const {
        auto it = tolerances.find(key);
        return it == tolerances.end() ? fallback : it->second;
    }

    static CampaignConfig from_json_file(const std::string& path);
    static CampaignConfig from_json_text(const std::string& text);
};

struct SampleRow {
    std::string check;
    int index = 0;
    double residual = 0.0;
    double threshold = 0.0;
    bool floor = false;  // expected-nonvanishing rows pass when residual >= threshold
    bool pass = false;
};

struct CheckResult {
    std::string check;
    bool pass = true;
    double max_residual = 0.0;
    int samples = 0;
    double wall_ms = 0.0;
    std::string details_json;  // witnesses, lattice data, chart reports
    std::vector<SampleRow> rows;
};

struct Report {
    CampaignConfig config;
    std::string instance_name;
    std::vector<CheckResult> results;
    bool all_pass = true;
};

/// Names accepted in CampaignConfig::checks, in canonical order.
const std::vector<std::string>& check_catalog();

Report run_campaign(const CampaignConfig& config);

std::string csv_text(const Report& report);
std::string report_json_text(const Report& report);

/// Executes the campaign and writes the CSV and JSON artifacts; returns the
/// report. Relative output paths resolve against $KRED_OUT_DIR.
Report run_campaign_to_files(const CampaignConfig& config);

std::string resolve_output_path(const std::string& path, const std::string& fallback_name);

}  // namespace kred
