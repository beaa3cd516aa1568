#pragma once

// The staged workflow: ingest -> classify -> filter -> score -> baseline
// statistics -> holdout classification -> agreement -> RRSSV, tier model and
// recommendations. Sheets are read, cleaned and scored one at a time, so
// only a single raw sheet is resident at any point.
//
// Scores of one split: the reference score of a country is its pillar score
// min-max scaled over all countries; the workflow score is the same pillar
// score scaled with the parameters fitted on the baseline countries only.
// Thresholds come from the baseline countries' workflow scores.

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "esgbench/agreement.hpp"
#include "esgbench/baseline_stats.hpp"
#include "esgbench/config.hpp"
#include "esgbench/error.hpp"
#include "esgbench/ingest.hpp"
#include "esgbench/ml_baseline.hpp"
#include "esgbench/recommend.hpp"
#include "esgbench/rrssv.hpp"
#include "esgbench/scoring.hpp"
#include "esgbench/taxonomy.hpp"

namespace esgbench {

inline constexpr std::string_view kVersion = "0.1.0";

/// Observes sheet residency: called with +1 after a raw sheet is read and
/// -1 once it has been released.
struct IngestHooks {
    std::function<void(const std::string& sheet_id, int delta)> on_raw_sheet;
};

struct Dataset {
    std::vector<std::string> countries;  // ascending
    std::vector<std::string> sheets;     // standardized ids in processing order
    std::map<std::string, CountryScoreCard> cards;
    std::array<ScalingParams, 4> scaling{};
    std::vector<std::string> warnings;
};

namespace detail {

/// Releases a raw sheet and reports it to the hook on every exit path.
class RawSheetGuard {
public:
    RawSheetGuard(const IngestHooks& hooks, std::string id) : hooks_(hooks), id_(std::move(id)) {
        if (hooks_.on_raw_sheet) hooks_.on_raw_sheet(id_, +1);
    }
    ~RawSheetGuard() {
        if (hooks_.on_raw_sheet) hooks_.on_raw_sheet(id_, -1);
    }
    RawSheetGuard(const RawSheetGuard&) = delete;
    RawSheetGuard& operator=(const RawSheetGuard&) = delete;

private:
    const IngestHooks& hooks_;
    std::string id_;
};

[[nodiscard]] inline Error with_stage(const Error& e, std::string stage) {
    Error out(e.kind(), e.what());
    out.set_stage(e.stage().empty() ? std::move(stage) : e.stage());
    return out;
}

template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw with_stage(e, stage);
    } catch (const std::filesystem::filesystem_error& e) {
        Error out(ErrorKind::data, e.what());
        out.set_stage(stage);
        throw out;
    }
}

}  // namespace detail

/// Cleaned table of every sheet in the directory, one at a time.
inline void for_each_clean_sheet(const PipelineConfig& cfg, const IngestHooks& hooks,
                                 const std::function<void(const ingest::CleanTable&)>& fn) {
    for (auto src : ingest::list_sheets(cfg.sheets_dir)) {
        if (src.skip_rows == ingest::kDefaultSkipRows) src.skip_rows = cfg.skip_rows;
        ingest::CleanTable table;
        {
            auto raw = std::make_unique<ingest::RawSheet>(ingest::read_sheet(src));
            detail::RawSheetGuard guard(hooks, raw->sheet_id);
            table = ingest::clean_sheet(*raw, src.skip_rows);
            raw.reset();
        }
        table.sheet_id = ingest::standardize_code(table.sheet_id);
        fn(table);
    }
}

/// Ingest, classify, filter and score every sheet; then pillar scores,
/// population scaling and composites.
[[nodiscard]] inline Dataset build_dataset(const PipelineConfig& cfg, const Registry& registry,
                                           const IngestHooks& hooks = {}) {
    Dataset ds;
    std::vector<std::string> filter = cfg.countries;
    std::set<std::string> seen_ids;
    detail::staged("ingest", [&] {
        for_each_clean_sheet(cfg, hooks, [&](const ingest::CleanTable& table) {
            const auto& spec = detail::staged("taxonomy", [&]() -> const QuestionSpec& {
                return registry.at(table.sheet_id);
            });
            if (!seen_ids.insert(spec.question_id).second) {
                throw detail::with_stage(DataError("question " + spec.question_id + " appears in two sheets"),
                                         "taxonomy");
            }
            ds.sheets.push_back(spec.question_id);
            if (filter.empty()) {
                filter = table.country_columns;
                std::sort(filter.begin(), filter.end());
            }
            const auto dists = detail::staged("filter", [&] {
                std::vector<ResponseDistribution> out;
                const auto all = distributions_from_table(table, spec.question_id);
                for (const auto& code : filter) {
                    const auto it = std::find_if(all.begin(), all.end(),
                                                 [&](const ResponseDistribution& d) { return d.country == code; });
                    if (it == all.end()) {
                        throw DataError("unknown country code " + code + " (absent from sheet " + table.sheet_id +
                                        ")");
                    }
                    out.push_back(*it);
                }
                return out;
            });
            detail::staged("scoring", [&] {
                for (const auto& d : dists) {
                    auto& card = ds.cards[d.country];
                    card.country = d.country;
                    card.indicator_scores[spec.question_id] = indicator_score(d, spec);
                }
            });
        });
    });
    if (ds.sheets.empty()) throw detail::with_stage(DataError("no sheets found in " + cfg.sheets_dir.string()), "ingest");
    for (const auto& q : registry.questions()) {
        if (!seen_ids.count(q.first)) ds.warnings.push_back("question " + q.first + " has no sheet");
    }

    detail::staged("aggregation", [&] {
        std::set<std::string> uniq(filter.begin(), filter.end());
        if (uniq.size() != filter.size()) throw ValidationError("duplicate country code in filter");
        ds.countries.assign(uniq.begin(), uniq.end());
        for (auto& [code, card] : ds.cards) fill_pillar_scores(card, registry);
        for (auto p : kPillars) {
            const auto k = index_of(p);
            std::map<std::string, double> raw;
            for (const auto& [code, card] : ds.cards) raw[code] = *card.pillar_scores[k];
            const auto g = minmax_scale_group(raw);
            ds.scaling[k] = g.params;
            if (g.degenerate && cfg.scaling) {
                ds.warnings.push_back("degenerate scaling for pillar " + std::string(pillar_code(p)) +
                                      ": all countries score equally");
            }
            for (auto& [code, card] : ds.cards) {
                card.scaled_pillar_scores[k] = cfg.scaling ? g.scaled.at(code) : *card.pillar_scores[k];
            }
        }
        for (auto& [code, card] : ds.cards) card.composite = composite_esg(card.scaled_pillar_scores, cfg.weights);
    });
    return ds;
}

struct PillarSplit {
    Pillar pillar = Pillar::gov;
    ScalingParams params;                    // fitted on the baseline countries
    std::map<std::string, double> workflow;  // every country, baseline-fitted scaling
    std::map<std::string, double> reference; // every country, population scaling
    TierThresholds thresholds;
};

struct SplitEvaluation {
    SplitPlan plan;
    std::array<PillarSplit, 4> pillars;
};

[[nodiscard]] inline SplitEvaluation evaluate_split(const Dataset& ds, SplitPlan plan, bool scaling) {
    SplitEvaluation ev;
    ev.plan = std::move(plan);
    for (auto p : kPillars) {
        const auto k = index_of(p);
        auto& ps = ev.pillars[k];
        ps.pillar = p;
        std::vector<double> base_raw;
        for (const auto& c : ev.plan.baseline_countries) base_raw.push_back(*ds.cards.at(c).pillar_scores[k]);
        ps.params.min = *std::min_element(base_raw.begin(), base_raw.end());
        ps.params.max = *std::max_element(base_raw.begin(), base_raw.end());
        for (const auto& c : ds.countries) {
            const auto& card = ds.cards.at(c);
            const double raw = *card.pillar_scores[k];
            ps.workflow[c] = scaling ? scale_with(ps.params, raw) : raw;
            ps.reference[c] = *card.scaled_pillar_scores[k];
        }
        std::vector<double> base;
        for (const auto& c : ev.plan.baseline_countries) base.push_back(ps.workflow.at(c));
        ps.thresholds = tier_thresholds(p, base);
    }
    return ev;
}

[[nodiscard]] inline std::vector<double> baseline_sample(const SplitEvaluation& ev, Pillar p) {
    std::vector<double> out;
    for (const auto& c : ev.plan.baseline_countries) out.push_back(ev.pillars[index_of(p)].workflow.at(c));
    return out;
}

/// Holdout agreement of reference vs workflow, plus the per-tier table of
/// the baseline distribution against the classified holdout.
[[nodiscard]] inline AgreementReport pillar_agreement(const SplitEvaluation& ev, Pillar p) {
    const auto& ps = ev.pillars[index_of(p)];
    PairedScores paired;
    paired.pillar = p;
    std::vector<double> hold;
    for (const auto& c : ev.plan.holdout_countries) {
        paired.pairs.push_back({c, ps.reference.at(c), ps.workflow.at(c)});
        hold.push_back(ps.workflow.at(c));
    }
    auto r = agreement_report(paired, ps.thresholds);
    r.per_tier_diffs = per_tier_diff_table(baseline_sample(ev, p), hold, ps.thresholds);
    return r;
}

[[nodiscard]] inline SeedMetrics split_metrics(const SplitEvaluation& ev) {
    SeedMetrics m;
    for (auto p : kPillars) {
        const auto r = pillar_agreement(ev, p);
        const std::string code(pillar_code(p));
        m[code + ".mae"] = r.errors.mae;
        m[code + ".rmse"] = r.errors.rmse;
        m[code + ".bias"] = r.errors.bias;
        m[code + ".spearman"] = r.spearman_rho.value_or(std::nan(""));
        m[code + ".accuracy"] = r.categorical.accuracy;
        m[code + ".macro_f1"] = r.categorical.macro_f1;
        m[code + ".cohen_kappa"] = r.categorical.cohen_kappa;
    }
    return m;
}

[[nodiscard]] inline RrssvReport run_validation(const Dataset& ds, const PipelineConfig& cfg) {
    return run_rrssv(
        ds.countries, cfg.seeds, cfg.fraction,
        [&](const SplitPlan& plan) { return split_metrics(evaluate_split(ds, plan, cfg.scaling)); }, cfg.threads);
}

/// One training task per pillar: baseline rows labelled by their workflow
/// tier, holdout rows by their reference tier, features the question-level
/// scores (NaN where a country lacks a question).
[[nodiscard]] inline ml::FoldBuilder ml_fold_builder(const Dataset& ds, const Registry& registry,
                                                     const PipelineConfig& cfg) {
    return [&ds, &registry, &cfg](const SplitPlan& plan) {
        const auto ev = evaluate_split(ds, plan, cfg.scaling);
        std::vector<ml::MlTask> tasks;
        for (auto p : kPillars) {
            const auto& ps = ev.pillars[index_of(p)];
            std::vector<std::string> qids;
            if (cfg.ml_features == FeatureScope::pillar) {
                qids = registry.ids_in(p);
            } else {
                for (const auto& q : registry.questions()) qids.push_back(q.first);
            }
            auto row = [&](const std::string& c) {
                std::vector<double> x;
                const auto& ind = ds.cards.at(c).indicator_scores;
                for (const auto& q : qids) {
                    const auto it = ind.find(q);
                    x.push_back(it == ind.end() ? std::nan("") : it->second);
                }
                return x;
            };
            ml::MlTask t;
            for (const auto& c : plan.baseline_countries) {
                t.train_x.push_back(row(c));
                t.train_y.push_back(assign_tier(ps.workflow.at(c), ps.thresholds));
            }
            for (const auto& c : plan.holdout_countries) {
                t.test_x.push_back(row(c));
                t.test_y.push_back(assign_tier(ps.reference.at(c), ps.thresholds));
            }
            tasks.push_back(std::move(t));
        }
        return tasks;
    };
}

[[nodiscard]] inline RrssvReport run_ml_baseline(const Dataset& ds, const Registry& registry,
                                                 const PipelineConfig& cfg) {
    ml::TrainOptions opts;
    opts.max_iterations = cfg.ml_max_iterations;
    return ml::evaluate_ml(ds.countries, cfg.seeds, cfg.fraction, ml_fold_builder(ds, registry, cfg), cfg.lambda,
                           cfg.threads, opts);
}

struct CompositeSplit {
    std::map<std::string, double> workflow;
    TierThresholds thresholds;  // pillar field unused
};

[[nodiscard]] inline CompositeSplit composite_split(const SplitEvaluation& ev, const PillarWeights& weights) {
    CompositeSplit cs;
    for (const auto& [c, _] : ev.pillars[0].workflow) {
        PillarValues v;
        for (auto p : kPillars) v[index_of(p)] = ev.pillars[index_of(p)].workflow.at(c);
        cs.workflow[c] = composite_esg(v, weights);
    }
    std::vector<double> base;
    for (const auto& c : ev.plan.baseline_countries) base.push_back(cs.workflow.at(c));
    cs.thresholds = tier_thresholds(Pillar::gov, base);
    return cs;
}

/// Flags among the holdout countries, judged on the composite score.
[[nodiscard]] inline std::vector<recommend::FlagRecord> flag_holdout(const SplitEvaluation& ev,
                                                                     const CompositeSplit& cs,
                                                                     const recommend::FlagPolicy& policy) {
    std::vector<recommend::TieredScore> scored;
    for (const auto& c : ev.plan.holdout_countries) {
        const double s = cs.workflow.at(c);
        scored.push_back({c, std::nullopt, s, assign_tier(s, cs.thresholds)});
    }
    return recommend::select_flagged(scored, policy);
}

struct RubricSummary {
    std::vector<std::string> raters;
    std::vector<std::string> items;
    std::array<std::optional<double>, 3> alpha;  // absent when undefined
    std::array<std::string, 3> note;
};

[[nodiscard]] inline RubricSummary summarize_rubric(const std::vector<recommend::RubricScores>& scores) {
    const auto matrices = recommend::record_rubric(scores);
    RubricSummary s;
    s.raters = matrices[0].raters;
    s.items = matrices[0].items;
    for (std::size_t k = 0; k < 3; ++k) {
        try {
            s.alpha[k] = krippendorff_alpha(matrices[k]);
        } catch (const DataError& e) {
            s.note[k] = e.what();
        }
    }
    return s;
}

[[nodiscard]] inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

enum class Stage { ingest, score, baseline, classify, agree, validate, ml_baseline, recommend, run };

struct StageTiming {
    std::string name;
    double ms = 0.0;
};

struct PipelineResults {
    Dataset data;
    std::vector<ingest::CleanTable> clean_tables;  // only kept for the ingest command
    std::optional<SplitEvaluation> primary;
    std::vector<BaselineReport> baseline;
    std::vector<AgreementReport> agreement;
    std::optional<RrssvReport> rrssv;
    std::optional<RrssvReport> ml;
    std::optional<std::vector<recommend::RecommendationRecord>> recommendations;
    std::optional<RubricSummary> rubric;
    std::vector<StageTiming> timings;
    std::vector<std::string> warnings;
};

using ClientFactory = std::function<std::unique_ptr<recommend::LlmClient>(const LlmConfig&)>;

/// Execute the stages needed for `target`. The full run performs all of
/// them, the optional ones as enabled in the config.
[[nodiscard]] inline PipelineResults run_pipeline(const PipelineConfig& cfg, Stage target = Stage::run,
                                                  const ClientFactory& make_client = {},
                                                  const IngestHooks& hooks = {}) {
    detail::staged("config", [&] { cfg.validate(); });
    PipelineResults res;
    auto timed = [&](const std::string& name, auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        detail::staged(name, fn);
        res.timings.push_back(
            {name, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()});
    };
    const bool all = target == Stage::run;

    if (target == Stage::ingest) {
        timed("ingest", [&] {
            for_each_clean_sheet(cfg, hooks, [&](const ingest::CleanTable& t) { res.clean_tables.push_back(t); });
        });
        return res;
    }

    // A client is built before any data work, so a missing credential fails fast.
    std::unique_ptr<recommend::LlmClient> client;
    if ((all && cfg.llm.enabled) || target == Stage::recommend) {
        timed("llm_setup", [&] {
            if (make_client) {
                client = make_client(cfg.llm);
            } else if (cfg.llm.client == "stub") {
                client = std::make_unique<recommend::StubClient>();
            } else {
                throw ValidationError("no transport available for llm client '" + cfg.llm.client + "'");
            }
        });
    }

    Registry registry;
    timed("registry", [&] { registry = Registry::load(cfg.registry); });
    timed("ingest_score", [&] { res.data = build_dataset(cfg, registry, hooks); });
    res.warnings = res.data.warnings;
    if (target == Stage::score) return res;

    timed("split", [&] {
        res.primary = evaluate_split(res.data, split_countries(res.data.countries, cfg.split_seed, cfg.fraction),
                                     cfg.scaling);
    });
    timed("baseline_stats", [&] {
        for (auto p : kPillars) res.baseline.push_back(baseline_report(p, baseline_sample(*res.primary, p)));
    });
    if (target == Stage::baseline || target == Stage::classify) return res;

    if (all || target == Stage::agree) {
        timed("agreement", [&] {
            for (auto p : kPillars) {
                auto r = pillar_agreement(*res.primary, p);
                bool empty = true;
                for (const auto& row : r.per_tier_diffs) empty = empty && row.workflow_n == 0;
                if (empty) res.warnings.push_back("empty holdout for pillar " + std::string(pillar_code(p)));
                res.agreement.push_back(std::move(r));
            }
        });
    }
    if ((all && cfg.rrssv_enabled) || target == Stage::validate) {
        timed("rrssv", [&] { res.rrssv = run_validation(res.data, cfg); });
    }
    if ((all && cfg.ml_enabled) || target == Stage::ml_baseline) {
        timed("ml_baseline", [&] {
            res.ml = run_ml_baseline(res.data, registry, cfg);
            const auto& conv = res.ml->metrics.at("converged_fraction");
            if (conv.mean && *conv.mean < 1.0) {
                res.warnings.push_back("tier model did not converge on every fold");
            }
        });
    }
    if (client) {
        timed("recommend", [&] {
            const auto cs = composite_split(*res.primary, cfg.weights);
            const auto flags = flag_holdout(*res.primary, cs, cfg.llm.policy);
            const auto tmpl = read_text_file(cfg.llm.prompt_template);
            res.recommendations = recommend::generate(*client, flags, tmpl, cfg.llm.concurrency);
            for (const auto& r : *res.recommendations) {
                if (!r.ok()) res.warnings.push_back("recommendation failed for " + r.flag.country + ": " + *r.error);
            }
        });
        if (cfg.llm.rubric) {
            timed("rubric", [&] {
                res.rubric = summarize_rubric(recommend::parse_rubric_csv(read_text_file(*cfg.llm.rubric)));
            });
        }
    }
    return res;
}

}  // namespace esgbench
