#pragma once

// Country-level scoring: indicator expectation over the response
// distribution, pillar means, weighted composite and per-pillar min-max
// scaling onto [1, 10].

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esgbench/error.hpp"
#include "esgbench/ingest.hpp"
#include "esgbench/taxonomy.hpp"

namespace esgbench {

struct ResponseDistribution {
    std::string country;
    std::string question_id;
    std::map<std::string, double> freqs;  // option label -> weighted frequency
};

/// Expected option score under the observed distribution, dk/na and
/// ignored labels excluded before normalisation.
[[nodiscard]] inline double indicator_score(const ResponseDistribution& dist,
                                            const QuestionSpec& spec) {
    double mass = 0.0;
    double weighted = 0.0;
    double lo = 10.0;
    double hi = 0.0;
    for (const auto& [label, f] : dist.freqs) {
        if (spec.na_labels.count(label) || spec.ignore_labels.count(label)) continue;
        const auto it = spec.option_scores.find(label);
        if (it == spec.option_scores.end()) {
            throw DataError("unknown option label '" + label + "' for question " + spec.question_id);
        }
        if (!std::isfinite(f) || f < 0.0) {
            throw DataError("invalid frequency for option '" + label + "' of question " +
                            spec.question_id + ", country " + dist.country);
        }
        if (f == 0.0) continue;
        mass += f;
        weighted += f * it->second;
        lo = std::min(lo, it->second);
        hi = std::max(hi, it->second);
    }
    if (!(mass > 0.0)) {
        throw DataError("no scoreable responses for country " + dist.country + ", question " +
                        spec.question_id);
    }
    return std::clamp(weighted / mass, lo, hi);
}

/// Plain arithmetic mean of one pillar's indicator scores.
[[nodiscard]] inline double pillar_score(std::span<const double> indicator_scores) {
    if (indicator_scores.empty()) throw DataError("pillar has no scored indicators");
    double sum = 0.0;
    for (double x : indicator_scores) sum += x;
    return sum / static_cast<double>(indicator_scores.size());
}

/// Importance-weighted mean; with all weights 1 this is pillar_score.
[[nodiscard]] inline double pillar_score(std::span<const double> indicator_scores,
                                         std::span<const double> importance) {
    if (indicator_scores.size() != importance.size()) {
        throw DataError("indicator and importance vectors differ in length");
    }
    if (indicator_scores.empty()) throw DataError("pillar has no scored indicators");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < indicator_scores.size(); ++i) {
        num += importance[i] * indicator_scores[i];
        den += importance[i];
    }
    if (!(den > 0.0)) throw DataError("pillar indicators carry zero total importance");
    return num / den;
}

struct PillarWeights {
    std::array<double, 4> w = {0.1, 0.5, 0.3, 0.1};  // GOV, ENE, BIO, CLI

    [[nodiscard]] double operator[](Pillar p) const noexcept { return w[index_of(p)]; }

    void validate() const {
        double sum = 0.0;
        for (double x : w) {
            if (!(x >= 0.0) || !std::isfinite(x)) {
                throw ValidationError("pillar weights must be finite and non-negative");
            }
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("pillar weights must sum to 1");
    }

    friend bool operator==(const PillarWeights&, const PillarWeights&) = default;
};

using PillarValues = std::array<std::optional<double>, 4>;

[[nodiscard]] inline double composite_esg(const PillarValues& pillar_scores,
                                          const PillarWeights& weights) {
    weights.validate();
    double esg = 0.0;
    for (auto p : kPillars) {
        const auto& s = pillar_scores[index_of(p)];
        if (!s) throw DataError("incomplete scorecard: missing " + std::string(pillar_code(p)));
        esg += weights[p] * *s;
    }
    return esg;
}

struct ScalingParams {
    double min = 0.0;
    double max = 0.0;

    [[nodiscard]] bool degenerate() const noexcept { return !(max > min); }
};

inline constexpr double kScaleLo = 1.0;
inline constexpr double kScaleHi = 10.0;

/// Linear map of x from [params.min, params.max] onto [lo, hi], clamped.
/// A degenerate range maps everything to the midpoint of [lo, hi].
[[nodiscard]] inline double scale_with(const ScalingParams& params, double x,
                                       double lo = kScaleLo, double hi = kScaleHi) {
    if (params.degenerate()) return (lo + hi) / 2.0;
    const double t = (x - params.min) / (params.max - params.min);
    return std::clamp(lo + (hi - lo) * t, lo, hi);
}

struct ScaledGroup {
    std::map<std::string, double> scaled;
    ScalingParams params;
    bool degenerate = false;  // true when all inputs were equal
};

[[nodiscard]] inline ScaledGroup minmax_scale_group(const std::map<std::string, double>& scores,
                                                    double lo = kScaleLo, double hi = kScaleHi) {
    if (scores.empty()) throw DataError("cannot scale an empty group");
    ScaledGroup out;
    out.params.min = scores.begin()->second;
    out.params.max = scores.begin()->second;
    for (const auto& [k, v] : scores) {
        out.params.min = std::min(out.params.min, v);
        out.params.max = std::max(out.params.max, v);
    }
    out.degenerate = out.params.degenerate();
    for (const auto& [k, v] : scores) out.scaled.emplace(k, scale_with(out.params, v, lo, hi));
    return out;
}

struct CountryScoreCard {
    std::string country;
    std::map<std::string, double> indicator_scores;
    PillarValues pillar_scores;
    PillarValues scaled_pillar_scores;
    std::optional<double> composite;
};

/// Per-country response distributions of one cleaned sheet. Rows sharing a
/// criteria label after forward-fill are pooled into one option frequency.
[[nodiscard]] inline std::vector<ResponseDistribution> distributions_from_table(
    const ingest::CleanTable& table, std::string_view question_id) {
    std::vector<ResponseDistribution> out;
    out.reserve(table.country_columns.size());
    for (std::size_t c = 0; c < table.country_columns.size(); ++c) {
        ResponseDistribution d;
        d.country = table.country_columns[c];
        d.question_id = std::string(question_id);
        for (std::size_t r = 0; r < table.criteria.size(); ++r) {
            d.freqs[table.criteria[r]] += table.values[r][c];
        }
        out.push_back(std::move(d));
    }
    return out;
}

/// Pillar scores of one card from its indicator scores. Indicators the
/// country lacks are skipped; a pillar with none left is an error.
inline void fill_pillar_scores(CountryScoreCard& card, const Registry& registry) {
    for (auto p : kPillars) {
        std::vector<double> xs;
        std::vector<double> ws;
        for (const auto& id : registry.ids_in(p)) {
            const auto it = card.indicator_scores.find(id);
            if (it == card.indicator_scores.end()) continue;
            xs.push_back(it->second);
            ws.push_back(registry.at(id).importance);
        }
        if (xs.empty()) {
            throw DataError("pillar has no scored indicators: country " + card.country + ", pillar " +
                            std::string(pillar_code(p)));
        }
        card.pillar_scores[index_of(p)] = pillar_score(xs, ws);
    }
}

}  // namespace esgbench
