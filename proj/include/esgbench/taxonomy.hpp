#pragma once

// Question metadata: response type, pillar membership and the 0..10 option
// polarity map. Polarity values are expert input and always come from a
// registry file; nothing here guesses them.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "esgbench/error.hpp"
#include "esgbench/ingest.hpp"

namespace esgbench {

enum class Pillar { gov, ene, bio, cli };

inline constexpr std::array<Pillar, 4> kPillars = {Pillar::gov, Pillar::ene, Pillar::bio,
                                                   Pillar::cli};

[[nodiscard]] constexpr std::string_view pillar_code(Pillar p) noexcept {
    switch (p) {
        case Pillar::gov: return "GOV";
        case Pillar::ene: return "ENE";
        case Pillar::bio: return "BIO";
        case Pillar::cli: return "CLI";
    }
    return "?";
}

[[nodiscard]] constexpr std::string_view pillar_name(Pillar p) noexcept {
    switch (p) {
        case Pillar::gov: return "Governance";
        case Pillar::ene: return "Energy & Circular Economy";
        case Pillar::bio: return "Biodiversity";
        case Pillar::cli: return "Climate Strategy";
    }
    return "?";
}

[[nodiscard]] constexpr std::size_t index_of(Pillar p) noexcept {
    return static_cast<std::size_t>(p);
}

[[nodiscard]] inline std::optional<Pillar> parse_pillar(std::string_view code) {
    for (auto p : kPillars) {
        if (ingest::standardize_code(code) == pillar_code(p)) return p;
    }
    return std::nullopt;
}

enum class ResponseKind { single_choice, multiple_choice, max_multiple_choice, write_down_binned };

struct ResponseType {
    ResponseKind kind = ResponseKind::single_choice;
    int max = 0;  // only meaningful for max_multiple_choice, >= 1 there

    friend bool operator==(const ResponseType&, const ResponseType&) = default;
};

[[nodiscard]] constexpr std::string_view kind_name(ResponseKind k) noexcept {
    switch (k) {
        case ResponseKind::single_choice: return "single";
        case ResponseKind::multiple_choice: return "multiple";
        case ResponseKind::max_multiple_choice: return "max_multiple";
        case ResponseKind::write_down_binned: return "write_down_binned";
    }
    return "?";
}

struct QuestionSpec {
    std::string question_id;
    ResponseType response_type;
    Pillar pillar = Pillar::gov;
    std::map<std::string, double> option_scores;
    std::set<std::string> na_labels;
    std::set<std::string> ignore_labels;  // e.g. "Total" rows of an export
    double importance = 1.0;              // within-pillar weight, 1 = plain mean
    std::vector<double> midpoints;        // binned write-down questions only
};

/// Bin scores 10*(m - min m)/(max m - min m) for strictly increasing midpoints.
[[nodiscard]] inline std::vector<double> dx5_scores(std::span<const double> midpoints) {
    if (midpoints.size() < 2) {
        throw ValidationError("binned question needs at least 2 midpoints");
    }
    for (std::size_t i = 0; i < midpoints.size(); ++i) {
        if (!std::isfinite(midpoints[i]) || (i > 0 && !(midpoints[i] > midpoints[i - 1]))) {
            throw ValidationError("bin midpoints must be finite and strictly increasing");
        }
    }
    const double lo = midpoints.front();
    const double range = midpoints.back() - lo;
    std::vector<double> out;
    out.reserve(midpoints.size());
    for (double m : midpoints) out.push_back(10.0 * (m - lo) / range);
    out.back() = 10.0;  // 10 * r / r can round below 10
    return out;
}

[[nodiscard]] inline std::map<std::string, double> dx5_option_scores(
    const std::vector<std::string>& bin_labels, std::span<const double> midpoints) {
    if (bin_labels.size() != midpoints.size()) {
        throw ValidationError("binned question has " + std::to_string(bin_labels.size()) +
                              " bins but " + std::to_string(midpoints.size()) + " midpoints");
    }
    const auto scores = dx5_scores(midpoints);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < bin_labels.size(); ++i) {
        if (!out.emplace(bin_labels[i], scores[i]).second) {
            throw ValidationError("duplicate bin label " + bin_labels[i]);
        }
    }
    return out;
}

class Registry {
public:
    Registry() = default;

    /// Validates and inserts. Throws ValidationError on any violated invariant.
    void add(QuestionSpec q) {
        q.question_id = ingest::standardize_code(q.question_id);
        validate(q);
        const auto id = q.question_id;
        if (!questions_.emplace(id, std::move(q)).second) {
            throw ValidationError("duplicate question id " + id);
        }
    }

    [[nodiscard]] const QuestionSpec* find(std::string_view id) const {
        const auto it = questions_.find(ingest::standardize_code(id));
        return it == questions_.end() ? nullptr : &it->second;
    }

    [[nodiscard]] const QuestionSpec& at(std::string_view id) const {
        if (const auto* q = find(id)) return *q;
        throw DataError("unclassified question: " + std::string(id));
    }

    [[nodiscard]] const std::map<std::string, QuestionSpec>& questions() const noexcept {
        return questions_;
    }

    [[nodiscard]] std::vector<std::string> ids_in(Pillar p) const {
        std::vector<std::string> out;
        for (const auto& [id, q] : questions_) {
            if (q.pillar == p) out.push_back(id);
        }
        return out;
    }

    [[nodiscard]] std::size_t size() const noexcept { return questions_.size(); }

    static Registry from_json(const nlohmann::json& j);
    static Registry load(const std::filesystem::path& path);

private:
    static void validate(const QuestionSpec& q) {
        const auto& id = q.question_id;
        if (id.empty()) throw ValidationError("question with empty id");
        if (q.option_scores.empty()) throw ValidationError("question " + id + " has no option scores");
        for (const auto& [label, s] : q.option_scores) {
            if (!(s >= 0.0 && s <= 10.0)) {
                throw ValidationError("question " + id + " option '" + label +
                                      "' score outside [0,10]");
            }
            if (q.na_labels.count(label) || q.ignore_labels.count(label)) {
                throw ValidationError("question " + id + " label '" + label +
                                      "' is both scored and na/ignored");
            }
        }
        if (q.response_type.kind == ResponseKind::max_multiple_choice && q.response_type.max < 1) {
            throw ValidationError("question " + id + " max_multiple needs max >= 1");
        }
        if (!(q.importance >= 0.0) || !std::isfinite(q.importance)) {
            throw ValidationError("question " + id + " importance must be finite and >= 0");
        }
    }

    std::map<std::string, QuestionSpec> questions_;
};

inline Registry Registry::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("questions") || !j["questions"].is_array()) {
        throw ValidationError("registry needs a \"questions\" array");
    }
    Registry reg;
    for (const auto& e : j["questions"]) {
        try {
            QuestionSpec q;
            q.question_id = e.at("id").get<std::string>();
            const auto type = e.at("type").get<std::string>();
            if (type == "single") {
                q.response_type = {ResponseKind::single_choice, 0};
            } else if (type == "multiple") {
                q.response_type = {ResponseKind::multiple_choice, 0};
            } else if (type == "max_multiple") {
                q.response_type = {ResponseKind::max_multiple_choice, e.at("max").get<int>()};
            } else if (type == "write_down_binned") {
                q.response_type = {ResponseKind::write_down_binned, 0};
            } else {
                throw ValidationError("question " + q.question_id + " has unknown type '" + type + "'");
            }
            const auto pillar = parse_pillar(e.at("pillar").get<std::string>());
            if (!pillar) throw ValidationError("question " + q.question_id + " has unknown pillar");
            q.pillar = *pillar;
            if (q.response_type.kind == ResponseKind::write_down_binned) {
                q.midpoints = e.at("midpoints").get<std::vector<double>>();
                q.option_scores =
                    dx5_option_scores(e.at("bins").get<std::vector<std::string>>(), q.midpoints);
            } else {
                q.option_scores = e.at("options").get<std::map<std::string, double>>();
            }
            for (const auto& l : e.value("na", std::vector<std::string>{})) q.na_labels.insert(l);
            for (const auto& l : e.value("ignore", std::vector<std::string>{})) q.ignore_labels.insert(l);
            q.importance = e.value("importance", 1.0);
            reg.add(std::move(q));
        } catch (const nlohmann::json::exception& ex) {
            throw ValidationError("malformed registry entry " + e.dump() + ": " + ex.what());
        }
    }
    return reg;
}

inline Registry Registry::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read registry " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("registry " + path.string() + " is not valid JSON: " + e.what());
    }
}

[[nodiscard]] inline ResponseType classify_question(std::string_view question_id,
                                                    const Registry& registry) {
    const auto* q = registry.find(question_id);
    if (!q) throw DataError("unclassified question: " + std::string(question_id));
    return q->response_type;
}

[[nodiscard]] inline Pillar pillar_of(std::string_view question_id, const Registry& registry) {
    const auto* q = registry.find(question_id);
    if (!q) throw DataError("unassigned pillar: " + std::string(question_id));
    return q->pillar;
}

}  // namespace esgbench
