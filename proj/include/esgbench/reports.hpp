#pragma once

// Report files. Tables render 3 decimals (p-values 4), JSON carries full
// precision. Every file is written to a temporary sibling and renamed, so a
// failed write never leaves a truncated report behind.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "esgbench/pipeline.hpp"
#include "esgbench/text.hpp"

namespace esgbench::reports {

namespace fs = std::filesystem;

class ReportWriter {
public:
    explicit ReportWriter(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw ValidationError("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    void write(const std::string& name, const std::string& content) {
        const auto target = dir_ / name;
        const auto tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw ValidationError("cannot write report " + target.string());
            out << content;
            out.flush();
            if (!out) throw ValidationError("cannot write report " + target.string());
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec) throw ValidationError("cannot write report " + target.string() + ": " + ec.message());
        digests_[name] = recommend::sha256_hex(content);
    }

    [[nodiscard]] const std::map<std::string, std::string>& digests() const noexcept { return digests_; }
    [[nodiscard]] const fs::path& dir() const noexcept { return dir_; }

private:
    fs::path dir_;
    std::map<std::string, std::string> digests_;
};

[[nodiscard]] inline std::string csv(const std::vector<std::string>& header,
                                     const std::vector<std::vector<std::string>>& rows) {
    std::string out = text::csv_line(header);
    for (const auto& r : rows) out += text::csv_line(r);
    return out;
}

[[nodiscard]] inline std::string f3(double x) { return text::fixed(x, 3); }
[[nodiscard]] inline std::string f3(const std::optional<double>& x) { return x ? f3(*x) : std::string(); }

[[nodiscard]] inline nlohmann::json opt(const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json();
}

[[nodiscard]] inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

[[nodiscard]] inline std::string clean_table_csv(const ingest::CleanTable& t) {
    std::vector<std::string> header = {text::is_blank(t.criteria_header) ? std::string("criteria") : std::string(text::trim(*t.criteria_header))};
    header.insert(header.end(), t.country_columns.begin(), t.country_columns.end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < t.criteria.size(); ++r) {
        std::vector<std::string> row = {t.criteria[r]};
        for (double v : t.values[r]) row.push_back(text::shortest(v));
        rows.push_back(std::move(row));
    }
    return csv(header, rows);
}

[[nodiscard]] inline std::string indicators_csv(const Dataset& ds, const Registry& registry) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : ds.countries) {
        for (const auto& [q, s] : ds.cards.at(c).indicator_scores) {
            rows.push_back({c, q, std::string(pillar_code(registry.at(q).pillar)), f3(s)});
        }
    }
    return csv({"country", "question", "pillar", "score"}, rows);
}

[[nodiscard]] inline std::string scores_csv(const Dataset& ds) {
    std::vector<std::string> header = {"country"};
    for (auto p : kPillars) header.push_back(std::string(pillar_code(p)) + "_raw");
    for (auto p : kPillars) header.push_back(std::string(pillar_code(p)) + "_scaled");
    header.push_back("composite");
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : ds.countries) {
        const auto& card = ds.cards.at(c);
        std::vector<std::string> row = {c};
        for (auto p : kPillars) row.push_back(f3(card.pillar_scores[index_of(p)]));
        for (auto p : kPillars) row.push_back(f3(card.scaled_pillar_scores[index_of(p)]));
        row.push_back(f3(card.composite));
        rows.push_back(std::move(row));
    }
    return csv(header, rows);
}

[[nodiscard]] inline std::string baseline_stats_csv(const std::vector<BaselineReport>& reports) {
    std::vector<std::vector<std::string>> rows;
    auto test_cols = [](const std::optional<NormalityResult>& r) -> std::vector<std::string> {
        if (!r) return {"", "", ""};
        return {text::fixed(r->statistic, 4), text::fixed(r->p_value, 4), r->normal_at_5pct ? "yes" : "no"};
    };
    for (const auto& r : reports) {
        std::vector<std::string> row = {std::string(pillar_code(r.pillar)), std::to_string(r.stats.n),
                                        f3(r.stats.mean), f3(r.stats.std), f3(r.stats.median), f3(r.stats.q1),
                                        f3(r.stats.q3)};
        for (auto& s : test_cols(r.shapiro)) row.push_back(std::move(s));
        for (auto& s : test_cols(r.dagostino)) row.push_back(std::move(s));
        rows.push_back(std::move(row));
    }
    return csv({"pillar", "n", "mean", "std", "median", "q1", "q3", "shapiro_w", "shapiro_p", "shapiro_normal",
                "dagostino_k2", "dagostino_p", "dagostino_normal"},
               rows);
}

[[nodiscard]] inline std::string thresholds_csv(const SplitEvaluation& ev) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& ps : ev.pillars) {
        rows.push_back({std::string(pillar_code(ps.pillar)), f3(ps.thresholds.q1), f3(ps.thresholds.q2),
                        f3(ps.thresholds.q3)});
    }
    return csv({"pillar", "q1", "q2", "q3"}, rows);
}

[[nodiscard]] inline std::string classification_csv(const Dataset& ds, const SplitEvaluation& ev) {
    const std::set<std::string> base(ev.plan.baseline_countries.begin(), ev.plan.baseline_countries.end());
    std::vector<std::vector<std::string>> rows;
    for (const auto& ps : ev.pillars) {
        for (const auto& c : ds.countries) {
            const double r = ps.reference.at(c);
            const double w = ps.workflow.at(c);
            rows.push_back({c, base.count(c) ? "baseline" : "holdout", std::string(pillar_code(ps.pillar)), f3(r),
                            f3(w), std::string(tier_name(assign_tier(r, ps.thresholds))),
                            std::string(tier_name(assign_tier(w, ps.thresholds)))});
        }
    }
    return csv({"country", "set", "pillar", "reference_score", "workflow_score", "reference_tier", "workflow_tier"},
               rows);
}

/// Columns of the score-difference table: Group, Classification, Baseline,
/// Workflow, Diff. Tiers without members leave their cells empty.
[[nodiscard]] inline std::string tier_diffs_csv(const std::vector<AgreementReport>& reports) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        for (const auto& d : r.per_tier_diffs) {
            rows.push_back({std::string(pillar_name(d.pillar)), std::string(tier_name(d.tier)), f3(d.baseline_mean),
                            f3(d.workflow_mean), f3(d.diff())});
        }
    }
    return csv({"Group", "Classification", "Baseline", "Workflow", "Diff."}, rows);
}

[[nodiscard]] inline nlohmann::json split_json(const SplitPlan& plan) {
    return {{"seed", plan.seed},
            {"fraction", plan.fraction},
            {"baseline_countries", plan.baseline_countries},
            {"holdout_countries", plan.holdout_countries}};
}

[[nodiscard]] inline nlohmann::json agreement_json(const SplitEvaluation& ev, const std::vector<AgreementReport>& reports) {
    nlohmann::json pillars = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json diffs = nlohmann::json::array();
        for (const auto& d : r.per_tier_diffs) {
            diffs.push_back({{"tier", tier_name(d.tier)},
                             {"baseline_n", d.baseline_n},
                             {"workflow_n", d.workflow_n},
                             {"baseline_mean", opt(d.baseline_mean)},
                             {"workflow_mean", opt(d.workflow_mean)},
                             {"diff", opt(d.diff())}});
        }
        nlohmann::json absent = nlohmann::json::array();
        for (auto t : r.categorical.absent_classes) absent.push_back(tier_name(t));
        pillars.push_back({{"pillar", pillar_code(r.pillar)},
                           {"name", pillar_name(r.pillar)},
                           {"n", r.n},
                           {"mae", r.errors.mae},
                           {"rmse", r.errors.rmse},
                           {"bias", r.errors.bias},
                           {"spearman", opt(r.spearman_rho)},
                           {"accuracy", r.categorical.accuracy},
                           {"macro_f1", r.categorical.macro_f1},
                           {"cohen_kappa", r.categorical.cohen_kappa},
                           {"kappa_degenerate", r.categorical.kappa_degenerate},
                           {"absent_classes", absent},
                           {"thresholds", {{"q1", r.thresholds.q1}, {"q2", r.thresholds.q2}, {"q3", r.thresholds.q3}}},
                           {"per_tier_diffs", diffs}});
    }
    return {{"split", split_json(ev.plan)}, {"pillars", pillars}};
}

[[nodiscard]] inline nlohmann::json metrics_json(const RrssvReport& r) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, s] : r.metrics) {
        nlohmann::json per = nlohmann::json::array();
        for (double v : s.per_seed) per.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
        metrics[name] = {{"mean", opt(s.mean)}, {"std", opt(s.std)}, {"valid", s.valid}, {"per_seed", per}};
    }
    return metrics;
}

[[nodiscard]] inline nlohmann::json rrssv_json(const RrssvReport& r) {
    return {{"seeds", r.seeds}, {"fraction", r.fraction}, {"metrics", metrics_json(r)}};
}

[[nodiscard]] inline nlohmann::json ml_json(const RrssvReport& r, const PipelineConfig& cfg) {
    return {{"experimental", true},
            {"task", "tier prediction per country and pillar"},
            {"model", "multinomial logistic regression, L2"},
            {"features", cfg.ml_features == FeatureScope::pillar ? "pillar" : "all"},
            {"lambda", cfg.lambda},
            {"seeds", r.seeds},
            {"fraction", r.fraction},
            {"metrics", metrics_json(r)}};
}

[[nodiscard]] inline std::string recommendations_jsonl(const std::vector<recommend::RecommendationRecord>& recs) {
    std::string out;
    for (const auto& r : recs) out += recommend::to_json(r).dump() + "\n";
    return out;
}

[[nodiscard]] inline nlohmann::json rubric_json(const RubricSummary& s) {
    nlohmann::json alpha;
    nlohmann::json notes = nlohmann::json::object();
    for (std::size_t k = 0; k < 3; ++k) {
        const std::string name(recommend::kRubricCriteria[k]);
        alpha[name] = opt(s.alpha[k]);
        if (!s.note[k].empty()) notes[name] = s.note[k];
    }
    nlohmann::json j = {{"raters", s.raters}, {"items", s.items}, {"alpha", alpha}};
    if (!notes.empty()) j["notes"] = notes;
    return j;
}

/// Histogram of the baseline scores with the classified holdout scores
/// overlaid, unit bins over [1, 10], quartile cut-points as dashed lines.
[[nodiscard]] inline std::string histogram_svg(Pillar p, const std::vector<double>& baseline,
                                               const std::vector<double>& classified, const TierThresholds& t) {
    constexpr int kBins = 9;
    constexpr double kW = 480, kH = 300, kLeft = 40, kBottom = 260, kPlotW = 420, kPlotH = 220;
    std::array<int, kBins> hb{};
    std::array<int, kBins> hc{};
    auto bin = [](double s) { return std::clamp(static_cast<int>(std::floor(s - 1.0)), 0, kBins - 1); };
    for (double s : baseline) ++hb[static_cast<std::size_t>(bin(s))];
    for (double s : classified) ++hc[static_cast<std::size_t>(bin(s))];
    int top = 1;
    for (int k = 0; k < kBins; ++k) top = std::max({top, hb[static_cast<std::size_t>(k)], hc[static_cast<std::size_t>(k)]});
    auto x_of = [&](double s) { return kLeft + (s - 1.0) / 9.0 * kPlotW; };
    auto h_of = [&](int n) { return kPlotH * n / top; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", kW, kH, kW,
        kH);
    svg += fmt::format("<title>{} score distribution</title>\n", pillar_name(p));
    svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
    const double bw = kPlotW / kBins;
    for (int k = 0; k < kBins; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const double x = kLeft + k * bw;
        svg += fmt::format(
            "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#9e9e9e\" opacity=\"0.7\"/>\n",
            x + 2, kBottom - h_of(hb[i]), bw / 2 - 2, h_of(hb[i]));
        svg += fmt::format(
            "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#1f77b4\" opacity=\"0.8\"/>\n",
            x + bw / 2, kBottom - h_of(hc[i]), bw / 2 - 2, h_of(hc[i]));
    }
    for (double q : {t.q1, t.q2, t.q3}) {
        svg += fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n",
            x_of(q), kBottom - kPlotH, kBottom);
    }
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", kLeft, kBottom,
                       kLeft + kPlotW, kBottom);
    for (int s = 1; s <= 10; ++s) {
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n", x_of(s),
                           kBottom + 14, s);
    }
    svg += fmt::format("<text x=\"{}\" y=\"18\" font-size=\"12\">{} (grey: baseline, blue: classified)</text>\n",
                       kLeft, pillar_name(p));
    svg += "</svg>\n";
    return svg;
}

struct InputDigests {
    std::map<std::string, std::string> files;
};

[[nodiscard]] inline InputDigests input_digests(const PipelineConfig& cfg) {
    InputDigests d;
    auto add = [&](const fs::path& p, const std::string& key) {
        d.files[key] = recommend::sha256_hex(read_text_file(p));
    };
    for (const auto& src : ingest::list_sheets(cfg.sheets_dir)) add(src.file, "sheets/" + src.file.filename().string());
    add(cfg.registry, "registry");
    if (cfg.llm.enabled) add(cfg.llm.prompt_template, "prompt_template");
    if (cfg.llm.rubric) add(*cfg.llm.rubric, "rubric");
    return d;
}

/// Manifest of a run; `error` is set for a failed run.
[[nodiscard]] inline nlohmann::json manifest_json(const PipelineConfig& cfg, const PipelineResults* res,
                                                  const std::map<std::string, std::string>& outputs,
                                                  const std::optional<Error>& error = std::nullopt) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = cfg.snapshot();
    try {
        j["inputs"] = input_digests(cfg).files;
    } catch (const std::exception& e) {
        j["inputs"] = {{"error", e.what()}};
    }
    j["seeds"] = cfg.seeds;
    j["prng"] = "mt19937_64, rejection-sampled bounds, downward Fisher-Yates";
    j["outputs"] = outputs;
    nlohmann::json timings = nlohmann::json::array();
    nlohmann::json warnings = nlohmann::json::array();
    if (res) {
        for (const auto& t : res->timings) timings.push_back({{"stage", t.name}, {"ms", t.ms}});
        for (const auto& w : res->warnings) warnings.push_back(w);
    }
    j["timings"] = timings;
    j["warnings"] = warnings;
    if (error) {
        j["error"] = {{"stage", error->stage()}, {"message", error->what()}, {"exit_code", exit_code(error->kind())}};
    }
    return j;
}

/// Write every report present in `res`; returns the output digests.
inline std::map<std::string, std::string> emit_reports(const PipelineResults& res, const PipelineConfig& cfg,
                                                       ReportWriter& w) {
    for (const auto& t : res.clean_tables) w.write("clean_" + t.sheet_id + ".csv", clean_table_csv(t));
    if (!res.data.cards.empty()) {
        const auto registry = Registry::load(cfg.registry);
        w.write("indicators.csv", indicators_csv(res.data, registry));
        w.write("scores.csv", scores_csv(res.data));
    }
    if (!res.baseline.empty()) w.write("baseline_stats.csv", baseline_stats_csv(res.baseline));
    if (res.primary) {
        w.write("thresholds.csv", thresholds_csv(*res.primary));
        w.write("classification.csv", classification_csv(res.data, *res.primary));
    }
    if (!res.agreement.empty()) {
        w.write("tier_diffs.csv", tier_diffs_csv(res.agreement));
        w.write("agreement.json", json_text(agreement_json(*res.primary, res.agreement)));
        for (auto p : kPillars) {
            const auto& ps = res.primary->pillars[index_of(p)];
            std::vector<double> hold;
            for (const auto& c : res.primary->plan.holdout_countries) hold.push_back(ps.workflow.at(c));
            w.write("hist_" + std::string(pillar_code(p)) + ".svg",
                    histogram_svg(p, baseline_sample(*res.primary, p), hold, ps.thresholds));
        }
    }
    if (res.rrssv) w.write("rrssv.json", json_text(rrssv_json(*res.rrssv)));
    if (res.ml) w.write("ml_baseline.json", json_text(ml_json(*res.ml, cfg)));
    if (res.recommendations) w.write("recommendations.jsonl", recommendations_jsonl(*res.recommendations));
    if (res.rubric) w.write("rubric.json", json_text(rubric_json(*res.rubric)));
    return w.digests();
}

}  // namespace esgbench::reports
