// esgbench command-line interface. Data goes to files in the output
// directory, logs to stderr. Exit codes: 0 ok, 1 validation, 2 data,
// 3 transport.

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "esgbench/esgbench.hpp"
#include "esgbench/http_transport.hpp"

namespace {

using namespace esgbench;

struct Overrides {
    std::string config;
    std::string out;
    std::optional<unsigned> threads;
    std::string seeds;
    std::optional<double> fraction;
    std::optional<double> lambda;
    std::string rubric;
    std::string countries;
    std::string client;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "Pipeline configuration (INI)")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", o.out, "Output directory (overrides run.output)");
    cmd->add_option("--countries", o.countries, "Comma-separated country filter");
}

PipelineConfig effective_config(const Overrides& o) {
    auto cfg = load_config(o.config);
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.threads) cfg.threads = *o.threads;
    if (!o.seeds.empty()) cfg.seeds = parse_seeds(o.seeds);
    if (o.fraction) cfg.fraction = *o.fraction;
    if (o.lambda) cfg.lambda = *o.lambda;
    if (!o.rubric.empty()) cfg.llm.rubric = o.rubric;
    if (!o.client.empty()) cfg.llm.client = o.client;
    if (!o.countries.empty()) {
        cfg.countries.clear();
        for (const auto& c : config_detail::split_list(o.countries)) cfg.countries.push_back(ingest::standardize_code(c));
    }
    return cfg;
}

std::unique_ptr<recommend::LlmClient> make_client(const LlmConfig& llm) {
    if (llm.client == "stub") return std::make_unique<recommend::StubClient>();
    return std::make_unique<recommend::HttpClient>(llm.settings, std::make_shared<recommend::HttplibTransport>());
}

void log_summary(const PipelineResults& res) {
    if (!res.data.countries.empty()) {
        fmt::print(stderr, "scored {} countries over {} sheets\n", res.data.countries.size(), res.data.sheets.size());
    }
    for (const auto& a : res.agreement) {
        fmt::print(stderr, "{}: MAE {:.3f} RMSE {:.3f} bias {:+.3f} accuracy {:.3f} kappa {:.3f}\n",
                   pillar_code(a.pillar), a.errors.mae, a.errors.rmse, a.errors.bias, a.categorical.accuracy,
                   a.categorical.cohen_kappa);
    }
    auto summary = [](const char* label, const RrssvReport& r, const std::string& metric) {
        const auto it = r.metrics.find(metric);
        if (it == r.metrics.end() || !it->second.mean) return;
        fmt::print(stderr, "{} {} over {} seeds: {:.3f} +/- {:.3f}\n", label, metric, r.seeds.size(),
                   *it->second.mean, it->second.std.value_or(0.0));
    };
    if (res.rrssv) {
        for (auto p : kPillars) summary("validation", *res.rrssv, std::string(pillar_code(p)) + ".mae");
    }
    if (res.ml) {
        summary("tier model (experimental)", *res.ml, "accuracy");
        summary("tier model (experimental)", *res.ml, "macro_f1");
    }
    if (res.recommendations) fmt::print(stderr, "{} recommendation records\n", res.recommendations->size());
    for (const auto& w : res.warnings) fmt::print(stderr, "warning: {}\n", w);
}

int execute(const Overrides& o, Stage stage) {
    std::optional<PipelineConfig> cfg;
    try {
        cfg = effective_config(o);
        const auto res = run_pipeline(*cfg, stage, make_client);
        reports::ReportWriter writer(cfg->output_dir);
        const auto outputs = reports::emit_reports(res, *cfg, writer);
        writer.write("manifest.json", reports::json_text(reports::manifest_json(*cfg, &res, outputs)));
        log_summary(res);
        fmt::print(stderr, "reports written to {}\n", cfg->output_dir.string());
        return 0;
    } catch (const Error& e) {
        if (e.stage().empty()) {
            fmt::print(stderr, "error: {}\n", e.what());
        } else {
            fmt::print(stderr, "error in stage {}: {}\n", e.stage(), e.what());
        }
        if (cfg) {
            try {
                reports::ReportWriter writer(cfg->output_dir);
                writer.write("manifest.json", reports::json_text(reports::manifest_json(*cfg, nullptr, {}, e)));
            } catch (const std::exception&) {
                // the original error is the one worth reporting
            }
        }
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_code(ErrorKind::data);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reproducible ESG benchmarking pipeline"};
    app.require_subcommand(1);
    Overrides o;

    struct Command {
        const char* name;
        const char* help;
        Stage stage;
    };
    const Command commands[] = {
        {"ingest", "Clean every sheet and write the cleaned tables", Stage::ingest},
        {"score", "Indicator, pillar and composite scores", Stage::score},
        {"baseline", "Baseline statistics, normality tests and tier thresholds", Stage::baseline},
        {"classify", "Tier every country against the baseline thresholds", Stage::classify},
        {"agree", "Agreement between reference and workflow scores", Stage::agree},
        {"validate", "Repeated random sub-sampling validation", Stage::validate},
        {"ml-baseline", "Experimental tier model under repeated sub-sampling", Stage::ml_baseline},
        {"recommend", "Flag underperformers and request recommendations", Stage::recommend},
        {"run", "Full pipeline", Stage::run},
    };
    std::map<CLI::App*, Stage> stages;
    for (const auto& c : commands) {
        auto* cmd = app.add_subcommand(c.name, c.help);
        add_common(cmd, o);
        stages[cmd] = c.stage;
        const std::string name = c.name;
        if (name == "validate" || name == "ml-baseline" || name == "run") {
            cmd->add_option("--seeds", o.seeds, "Seed count N (seeds 0..N-1) or comma-separated list");
            cmd->add_option("--fraction", o.fraction, "Baseline fraction in (0,1)");
        }
        if (name == "ml-baseline" || name == "run") cmd->add_option("--lambda", o.lambda, "L2 strength");
        if (name == "recommend" || name == "run") {
            cmd->add_option("--rubric", o.rubric, "Rubric table (rater,item,relevance,actionability,faithfulness)");
            cmd->add_option("--llm-client", o.client, "stub or http");
        }
        if (name != "ingest") cmd->add_option("--threads", o.threads, "Worker threads for per-seed work");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::validation);
    }
    for (const auto& [cmd, stage] : stages) {
        if (cmd->parsed()) return execute(o, stage);
    }
    return exit_code(ErrorKind::validation);
}
