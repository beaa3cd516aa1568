#pragma once

// Pipeline configuration: an INI file with sections, every key optional
// except the inputs. Relative paths resolve against the file's directory.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "esgbench/error.hpp"
#include "esgbench/ingest.hpp"
#include "esgbench/recommend.hpp"
#include "esgbench/rrssv.hpp"
#include "esgbench/scoring.hpp"
#include "esgbench/text.hpp"

namespace esgbench {

enum class FeatureScope { pillar, all };

struct LlmConfig {
    bool enabled = true;
    std::string client = "stub";  // stub | http
    recommend::FlagPolicy policy;
    std::filesystem::path prompt_template;
    std::optional<std::filesystem::path> rubric;
    recommend::LlmSettings settings;
    unsigned concurrency = 1;
};

struct PipelineConfig {
    std::filesystem::path sheets_dir;
    std::filesystem::path registry;
    std::size_t skip_rows = ingest::kDefaultSkipRows;
    std::vector<std::string> countries;  // empty = every country of the first sheet
    PillarWeights weights;
    bool scaling = true;
    double fraction = kDefaultBaselineFraction;
    std::uint64_t split_seed = 0;
    bool rrssv_enabled = true;
    std::vector<std::uint64_t> seeds = default_seeds();
    bool ml_enabled = true;
    double lambda = 1.0;
    FeatureScope ml_features = FeatureScope::pillar;
    std::size_t ml_max_iterations = 5000;
    LlmConfig llm;
    unsigned threads = 1;
    std::filesystem::path output_dir = "out";

    void validate() const {
        std::error_code ec;
        if (!std::filesystem::is_directory(sheets_dir, ec)) {
            throw ValidationError("sheet directory not found: " + sheets_dir.string());
        }
        if (!std::filesystem::is_regular_file(registry, ec)) {
            throw ValidationError("registry not found: " + registry.string());
        }
        weights.validate();
        if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("fraction must be in (0,1)");
        if (rrssv_enabled || ml_enabled) {
            if (seeds.size() < 2) throw ValidationError("S-1 undefined: at least 2 seeds are required");
            std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
            if (uniq.size() != seeds.size()) throw ValidationError("duplicate seed in seed list");
        }
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");
        if (threads == 0) throw ValidationError("threads must be >= 1");
        if (llm.enabled) {
            if (llm.client != "stub" && llm.client != "http") {
                throw ValidationError("unknown llm client '" + llm.client + "' (expected stub or http)");
            }
            if (!std::filesystem::is_regular_file(llm.prompt_template, ec)) {
                throw ValidationError("prompt template not found: " + llm.prompt_template.string());
            }
            if (llm.concurrency == 0) throw ValidationError("llm concurrency must be >= 1");
        }
        if (llm.rubric && !std::filesystem::is_regular_file(*llm.rubric, ec)) {
            throw ValidationError("rubric table not found: " + llm.rubric->string());
        }
    }

    /// Every effective setting, defaults included. The credential itself is
    /// never recorded, only the variable name.
    [[nodiscard]] nlohmann::json snapshot() const {
        nlohmann::json j;
        j["input"] = {{"sheets", sheets_dir.generic_string()},
                      {"registry", registry.generic_string()},
                      {"skip_rows", skip_rows},
                      {"countries", countries}};
        j["scoring"] = {{"weights", weights.w}, {"scaling", scaling}};
        j["split"] = {{"fraction", fraction}, {"seed", split_seed}};
        j["rrssv"] = {{"enabled", rrssv_enabled}, {"seeds", seeds}};
        j["ml"] = {{"enabled", ml_enabled},
                   {"lambda", lambda},
                   {"features", ml_features == FeatureScope::pillar ? "pillar" : "all"},
                   {"max_iterations", ml_max_iterations}};
        j["recommend"] = {
            {"enabled", llm.enabled},
            {"client", llm.client},
            {"policy", llm.policy.kind == recommend::FlagPolicy::Kind::tier ? "tier" : "threshold"},
            {"threshold", llm.policy.threshold},
            {"prompt_template", llm.prompt_template.generic_string()},
            {"rubric", llm.rubric ? nlohmann::json(llm.rubric->generic_string()) : nlohmann::json()},
            {"endpoint", llm.settings.endpoint},
            {"model", llm.settings.model_id},
            {"credential_env", llm.settings.credential_env},
            {"max_retries", llm.settings.max_retries},
            {"backoff_ms", llm.settings.backoff_ms},
            {"temperature", llm.settings.temperature},
            {"concurrency", llm.concurrency}};
        j["run"] = {{"threads", threads}, {"output", output_dir.generic_string()}};
        return j;
    }
};

namespace config_detail {

[[nodiscard]] inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(',', start), s.size());
        const auto item = text::trim(s.substr(start, end - start));
        if (!item.empty()) out.emplace_back(item);
        start = end + 1;
    }
    return out;
}

[[nodiscard]] inline double to_double(const std::string& key, const std::string& v) {
    const auto x = text::parse_number(v);
    if (!x) throw ValidationError("config key " + key + " expects a number, got '" + v + "'");
    return *x;
}

[[nodiscard]] inline std::uint64_t to_u64(const std::string& key, std::string_view v) {
    v = text::trim(v);
    std::uint64_t x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
        throw ValidationError("config key " + key + " expects a non-negative integer, got '" + std::string(v) + "'");
    }
    return x;
}

[[nodiscard]] inline bool to_bool(const std::string& key, const std::string& v) {
    const auto t = std::string(text::trim(v));
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    throw ValidationError("config key " + key + " expects a boolean, got '" + v + "'");
}

}  // namespace config_detail

/// "N" means seeds 0..N-1; a comma-separated list is taken literally.
[[nodiscard]] inline std::vector<std::uint64_t> parse_seeds(std::string_view spec) {
    if (spec.find(',') == std::string_view::npos) {
        return default_seeds(static_cast<std::size_t>(config_detail::to_u64("seeds", spec)));
    }
    std::vector<std::uint64_t> out;
    for (const auto& s : config_detail::split_list(spec)) out.push_back(config_detail::to_u64("seeds", s));
    return out;
}

[[nodiscard]] inline PipelineConfig load_config(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError("cannot read config " + path.string() + ": " + e.message());
    }
    static const std::map<std::string, std::set<std::string>> known = {
        {"input", {"sheets", "registry", "skip_rows", "countries"}},
        {"scoring", {"weights", "scaling"}},
        {"split", {"fraction", "seed"}},
        {"rrssv", {"enabled", "seeds"}},
        {"ml", {"enabled", "lambda", "features", "max_iterations"}},
        {"recommend",
         {"enabled", "client", "policy", "threshold", "prompt_template", "rubric", "endpoint", "model",
          "credential_env", "max_retries", "backoff_ms", "concurrency"}},
        {"run", {"threads", "output"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw ValidationError("unknown config section [" + section + "]");
        for (const auto& [key, _] : body) {
            if (!it->second.count(key)) throw ValidationError("unknown config key " + section + "." + key);
        }
    }

    using namespace config_detail;
    const auto base = path.parent_path();
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return std::nullopt;
        return std::string(text::trim(*v));
    };
    auto resolve = [&](const std::string& p) { const std::filesystem::path fp(p); return fp.is_absolute() ? fp : base / fp; };

    PipelineConfig c;
    const auto sheets = get("input.sheets");
    const auto registry = get("input.registry");
    if (!sheets || sheets->empty()) throw ValidationError("config lacks input.sheets");
    if (!registry || registry->empty()) throw ValidationError("config lacks input.registry");
    c.sheets_dir = resolve(*sheets);
    c.registry = resolve(*registry);
    if (auto v = get("input.skip_rows")) c.skip_rows = to_u64("input.skip_rows", *v);
    if (auto v = get("input.countries")) {
        for (const auto& code : split_list(*v)) c.countries.push_back(ingest::standardize_code(code));
    }
    if (auto v = get("scoring.weights")) {
        const auto parts = split_list(*v);
        if (parts.size() != 4) throw ValidationError("scoring.weights needs four values (GOV,ENE,BIO,CLI)");
        for (std::size_t i = 0; i < 4; ++i) c.weights.w[i] = to_double("scoring.weights", parts[i]);
    }
    if (auto v = get("scoring.scaling")) c.scaling = to_bool("scoring.scaling", *v);
    if (auto v = get("split.fraction")) c.fraction = to_double("split.fraction", *v);
    if (auto v = get("split.seed")) c.split_seed = to_u64("split.seed", *v);
    if (auto v = get("rrssv.enabled")) c.rrssv_enabled = to_bool("rrssv.enabled", *v);
    if (auto v = get("rrssv.seeds")) c.seeds = parse_seeds(*v);
    if (auto v = get("ml.enabled")) c.ml_enabled = to_bool("ml.enabled", *v);
    if (auto v = get("ml.lambda")) c.lambda = to_double("ml.lambda", *v);
    if (auto v = get("ml.features")) {
        if (*v == "pillar") {
            c.ml_features = FeatureScope::pillar;
        } else if (*v == "all") {
            c.ml_features = FeatureScope::all;
        } else {
            throw ValidationError("ml.features must be pillar or all");
        }
    }
    if (auto v = get("ml.max_iterations")) c.ml_max_iterations = to_u64("ml.max_iterations", *v);
    if (auto v = get("recommend.enabled")) c.llm.enabled = to_bool("recommend.enabled", *v);
    if (auto v = get("recommend.client")) c.llm.client = *v;
    if (auto v = get("recommend.policy")) {
        if (*v == "tier") {
            c.llm.policy.kind = recommend::FlagPolicy::Kind::tier;
        } else if (*v == "threshold") {
            c.llm.policy.kind = recommend::FlagPolicy::Kind::threshold;
        } else {
            throw ValidationError("recommend.policy must be tier or threshold");
        }
    }
    if (auto v = get("recommend.threshold")) c.llm.policy.threshold = to_double("recommend.threshold", *v);
    c.llm.prompt_template = resolve(get("recommend.prompt_template").value_or("prompt.txt"));
    if (auto v = get("recommend.rubric"); v && !v->empty()) c.llm.rubric = resolve(*v);
    if (auto v = get("recommend.endpoint")) c.llm.settings.endpoint = *v;
    if (auto v = get("recommend.model")) c.llm.settings.model_id = *v;
    if (auto v = get("recommend.credential_env"); v && !v->empty()) c.llm.settings.credential_env = *v;
    if (auto v = get("recommend.max_retries")) {
        c.llm.settings.max_retries = static_cast<int>(to_u64("recommend.max_retries", *v));
    }
    if (auto v = get("recommend.backoff_ms")) {
        c.llm.settings.backoff_ms = static_cast<int>(to_u64("recommend.backoff_ms", *v));
    }
    if (auto v = get("recommend.concurrency")) {
        c.llm.concurrency = static_cast<unsigned>(to_u64("recommend.concurrency", *v));
    }
    if (auto v = get("run.threads")) c.threads = static_cast<unsigned>(to_u64("run.threads", *v));
    if (auto v = get("run.output"); v && !v->empty()) c.output_dir = *v;
    return c;
}

}  // namespace esgbench
