#pragma once

// Flagging of underperforming countries, prompt construction, LLM dispatch
// through a provider-agnostic client, and storage of expert rubric scores.

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "esgbench/agreement.hpp"
#include "esgbench/baseline_stats.hpp"
#include "esgbench/error.hpp"
#include "esgbench/parallel.hpp"
#include "esgbench/taxonomy.hpp"
#include "esgbench/text.hpp"

namespace esgbench::recommend {

struct FlagRecord {
    std::string country;
    std::optional<Pillar> pillar;  // empty = composite score
    double score = 0.0;
    Tier tier = Tier::weak;
    std::string feedback_line;

    friend bool operator==(const FlagRecord&, const FlagRecord&) = default;
};

/// "Scored only X.XX/10." with the score rounded half-up to 2 decimals.
[[nodiscard]] inline std::string feedback_line(double score) {
    return "Scored only " + text::round_half_up(score, 2) + "/10.";
}

[[nodiscard]] inline std::string subject_name(const std::optional<Pillar>& pillar) {
    return pillar ? std::string(pillar_name(*pillar)) : std::string("Composite ESG");
}

struct TieredScore {
    std::string country;
    std::optional<Pillar> pillar;
    double score = 0.0;
    Tier tier = Tier::weak;
};

struct FlagPolicy {
    enum class Kind { tier, threshold } kind = Kind::tier;
    double threshold = 0.0;  // threshold policy: flag score < threshold

    [[nodiscard]] bool flags(const TieredScore& s) const {
        return kind == Kind::tier ? index_of(s.tier) < index_of(Tier::good) : s.score < threshold;
    }
};

/// Default policy: exactly the Weak and Average entries. Output is ordered by
/// ascending score, then country.
[[nodiscard]] inline std::vector<FlagRecord> select_flagged(const std::vector<TieredScore>& scored,
                                                           const FlagPolicy& policy = {}) {
    std::vector<FlagRecord> out;
    for (const auto& s : scored) {
        if (!policy.flags(s)) continue;
        out.push_back({s.country, s.pillar, s.score, s.tier, feedback_line(s.score)});
    }
    std::stable_sort(out.begin(), out.end(), [](const FlagRecord& a, const FlagRecord& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.country < b.country;
    });
    return out;
}

inline constexpr std::array<std::string_view, 4> kPlaceholders = {"{country}", "{score}", "{tier}",
                                                                  "{pillar}"};

/// Substitute every placeholder. The score is rendered in its shortest
/// round-trip form, which keeps the prompt injective in the score.
[[nodiscard]] inline std::string build_prompt(const FlagRecord& flag, std::string_view tmpl) {
    for (auto ph : kPlaceholders) {
        if (tmpl.find(ph) == std::string_view::npos) {
            throw ValidationError("prompt template is missing placeholder " + std::string(ph));
        }
    }
    const std::map<std::string_view, std::string> values = {
        {"{country}", flag.country},
        {"{score}", text::shortest(flag.score)},
        {"{tier}", std::string(tier_name(flag.tier))},
        {"{pillar}", subject_name(flag.pillar)},
    };
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool replaced = false;
        if (tmpl[i] == '{') {
            for (const auto& [ph, v] : values) {
                if (tmpl.substr(i, ph.size()) == ph) {
                    out += v;
                    i += ph.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += tmpl[i++];
    }
    return out;
}

[[nodiscard]] inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw DataError("sha256 digest failed");
    }
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
}

struct Completion {
    std::string text;
    double latency_ms = 0.0;
    int retries = 0;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual Completion complete(const std::string& prompt) = 0;
    [[nodiscard]] virtual std::string model_id() const = 0;
    [[nodiscard]] virtual double temperature() const { return 0.0; }
    /// Replayable clients get a fixed timestamp so records are byte-stable.
    [[nodiscard]] virtual bool deterministic() const { return false; }
};

/// Returns a digest of the prompt instead of calling a model.
class StubClient final : public LlmClient {
public:
    Completion complete(const std::string& prompt) override {
        return {"[stub " + sha256_hex(prompt) + "] Recommendations unavailable in offline mode.", 0.0, 0};
    }
    [[nodiscard]] std::string model_id() const override { return "stub"; }
    [[nodiscard]] bool deterministic() const override { return true; }
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Raw POST. Implementations throw TransportError when no response arrives.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                              const std::string& body) = 0;
};

struct LlmSettings {
    std::string endpoint;  // may contain {model}
    std::string model_id;
    std::string credential_env = "ESGBENCH_LLM_API_KEY";
    int max_retries = 3;
    int backoff_ms = 500;  // doubled after each failed attempt
    double temperature = 0.0;
};

/// JSON-over-HTTP chat-completion client. The credential is read from the
/// environment when the client is built, so a missing key fails before any
/// request.
class HttpClient final : public LlmClient {
public:
    using Sleeper = std::function<void(int ms)>;

    HttpClient(LlmSettings settings, std::shared_ptr<Transport> transport, Sleeper sleep = {})
        : settings_(std::move(settings)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
        if (settings_.endpoint.empty()) throw ValidationError("llm endpoint not configured");
        if (settings_.model_id.empty()) throw ValidationError("llm model id not configured");
        if (settings_.max_retries < 0) throw ValidationError("llm max_retries must be >= 0");
        const char* key = std::getenv(settings_.credential_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ValidationError("llm credential missing: environment variable " + settings_.credential_env +
                                  " is not set");
        }
        key_ = key;
        if (!sleep_) sleep_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
    }

    [[nodiscard]] std::string url() const {
        std::string u = settings_.endpoint;
        const std::string ph = "{model}";
        for (auto p = u.find(ph); p != std::string::npos; p = u.find(ph, p + settings_.model_id.size())) {
            u.replace(p, ph.size(), settings_.model_id);
        }
        return u;
    }

    Completion complete(const std::string& prompt) override {
        const nlohmann::json request = {
            {"model", settings_.model_id},
            {"temperature", settings_.temperature},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        };
        const std::map<std::string, std::string> headers = {{"Authorization", "Bearer " + key_},
                                                            {"Content-Type", "application/json"}};
        const auto start = std::chrono::steady_clock::now();
        std::string last_error;
        int delay = settings_.backoff_ms;
        for (int attempt = 0; attempt <= settings_.max_retries; ++attempt) {
            if (attempt > 0) {
                sleep_(delay);
                delay *= 2;
            }
            try {
                const auto resp = transport_->post(url(), headers, request.dump());
                if (resp.status == 429 || resp.status >= 500) {
                    last_error = "http status " + std::to_string(resp.status);
                    continue;
                }
                if (resp.status != 200) {
                    throw TransportError("llm request rejected with http status " + std::to_string(resp.status));
                }
                Completion c;
                c.text = extract_text(resp.body);
                c.retries = attempt;
                c.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                                   .count();
                return c;
            } catch (const TransportError& e) {
                last_error = e.what();
                if (std::string_view(e.what()).starts_with("llm request rejected")) throw;
            }
        }
        throw TransportError("llm request failed after " + std::to_string(settings_.max_retries + 1) +
                             " attempts: " + last_error);
    }

    [[nodiscard]] std::string model_id() const override { return settings_.model_id; }
    [[nodiscard]] double temperature() const override { return settings_.temperature; }

private:
    static std::string extract_text(const std::string& body) {
        const auto j = nlohmann::json::parse(body, nullptr, false);
        if (j.is_discarded()) throw TransportError("llm response is not JSON");
        const auto* content = &j;
        for (const char* key : {"choices", "0", "message", "content"}) {
            if (content->is_array()) {
                if (content->empty()) throw TransportError("llm response has no choices");
                content = &(*content)[0];
            } else if (content->is_object() && content->contains(key)) {
                content = &(*content)[key];
            } else {
                throw TransportError("llm response lacks choices[0].message.content");
            }
        }
        if (!content->is_string() || content->get<std::string>().empty()) {
            throw TransportError("llm response content is empty");
        }
        return content->get<std::string>();
    }

    LlmSettings settings_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleep_;
    std::string key_;
};

struct RecommendationRecord {
    FlagRecord flag;
    std::string prompt;
    std::string response_text;
    std::string model_id;
    std::string timestamp;
    double temperature = 0.0;
    double latency_ms = 0.0;
    int retries = 0;
    std::optional<std::string> error;  // set when the call failed

    [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }
};

inline constexpr std::string_view kFixedTimestamp = "1970-01-01T00:00:00Z";

[[nodiscard]] inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec);
}

/// One record per flag, in input order. A transport failure becomes a
/// failure entry and the batch continues.
[[nodiscard]] inline std::vector<RecommendationRecord> generate(LlmClient& client,
                                                                const std::vector<FlagRecord>& flags,
                                                                std::string_view tmpl, unsigned concurrency = 1) {
    std::vector<RecommendationRecord> out(flags.size());
    for (std::size_t i = 0; i < flags.size(); ++i) {
        out[i].flag = flags[i];
        out[i].prompt = build_prompt(flags[i], tmpl);
        out[i].model_id = client.model_id();
        out[i].temperature = client.temperature();
    }
    parallel_for(flags.size(), concurrency, [&](std::size_t i) {
        auto& rec = out[i];
        rec.timestamp = client.deterministic() ? std::string(kFixedTimestamp) : utc_now();
        try {
            auto c = client.complete(rec.prompt);
            rec.response_text = std::move(c.text);
            rec.latency_ms = c.latency_ms;
            rec.retries = c.retries;
        } catch (const TransportError& e) {
            rec.error = e.what();
        }
    });
    return out;
}

[[nodiscard]] inline nlohmann::json to_json(const RecommendationRecord& r) {
    nlohmann::json j;
    j["country"] = r.flag.country;
    j["pillar"] = r.flag.pillar ? nlohmann::json(std::string(pillar_code(*r.flag.pillar))) : nlohmann::json();
    j["score"] = r.flag.score;
    j["tier"] = std::string(tier_name(r.flag.tier));
    j["feedback_line"] = r.flag.feedback_line;
    j["prompt"] = r.prompt;
    j["response_text"] = r.response_text;
    j["model_id"] = r.model_id;
    j["temperature"] = r.temperature;
    j["timestamp"] = r.timestamp;
    j["latency_ms"] = r.latency_ms;
    j["retries"] = r.retries;
    j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json();
    return j;
}

struct RubricScores {
    std::string rater;
    std::string item;
    int relevance = 0;
    int actionability = 0;
    int faithfulness = 0;
};

inline constexpr std::array<std::string_view, 3> kRubricCriteria = {"relevance", "actionability",
                                                                   "faithfulness"};

/// Rater x item matrices for relevance, actionability and faithfulness, with
/// raters and items in ascending order.
[[nodiscard]] inline std::array<RatingsMatrix, 3> record_rubric(const std::vector<RubricScores>& scores) {
    std::set<std::string> raters;
    std::set<std::string> items;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& s : scores) {
        for (int v : {s.relevance, s.actionability, s.faithfulness}) {
            if (v < 1 || v > 5) {
                throw ValidationError("rubric rating " + std::to_string(v) + " outside 1..5 by rater " + s.rater +
                                      " on item " + s.item);
            }
        }
        if (!seen.emplace(s.rater, s.item).second) {
            throw ValidationError("duplicate rubric entry for rater " + s.rater + " on item " + s.item);
        }
        raters.insert(s.rater);
        items.insert(s.item);
    }
    std::array<RatingsMatrix, 3> out;
    for (auto& m : out) {
        m.raters.assign(raters.begin(), raters.end());
        m.items.assign(items.begin(), items.end());
        m.ratings.assign(raters.size(), std::vector<std::optional<int>>(items.size()));
    }
    for (const auto& s : scores) {
        const auto r = static_cast<std::size_t>(std::distance(raters.begin(), raters.find(s.rater)));
        const auto i = static_cast<std::size_t>(std::distance(items.begin(), items.find(s.item)));
        out[0].ratings[r][i] = s.relevance;
        out[1].ratings[r][i] = s.actionability;
        out[2].ratings[r][i] = s.faithfulness;
    }
    return out;
}

/// Parse a rubric table with header rater,item,relevance,actionability,faithfulness.
[[nodiscard]] inline std::vector<RubricScores> parse_rubric_csv(std::string_view content) {
    const auto rows = text::parse_csv(content);
    if (rows.empty()) throw DataError("empty rubric table");
    const std::vector<std::string> expected = {"rater", "item", "relevance", "actionability", "faithfulness"};
    std::vector<std::string> header;
    for (const auto& c : rows.front()) header.emplace_back(c ? std::string(text::trim(*c)) : std::string());
    if (header != expected) throw DataError("rubric header must be rater,item,relevance,actionability,faithfulness");
    std::vector<RubricScores> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (std::all_of(row.begin(), row.end(), [](const text::Cell& c) { return text::is_blank(c); })) continue;
        if (row.size() != 5 || !row[0] || !row[1]) {
            throw DataError("malformed rubric row " + std::to_string(r + 1));
        }
        RubricScores s;
        s.rater = std::string(text::trim(*row[0]));
        s.item = std::string(text::trim(*row[1]));
        int* fields[] = {&s.relevance, &s.actionability, &s.faithfulness};
        for (int k = 0; k < 3; ++k) {
            const auto v = row[2 + k] ? text::parse_number(*row[2 + k]) : std::nullopt;
            if (!v || *v != static_cast<double>(static_cast<int>(*v))) {
                throw ValidationError("non-integral rubric rating by rater " + s.rater + " on item " + s.item);
            }
            *fields[k] = static_cast<int>(*v);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace esgbench::recommend
