#pragma once

// Baseline reference statistics: quantiles, descriptive summaries and the
// quartile tier thresholds every classified score is compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "esgbench/error.hpp"
#include "esgbench/normality.hpp"
#include "esgbench/taxonomy.hpp"

namespace esgbench {

enum class Tier { weak, average, good, excellent };

inline constexpr std::array<Tier, 4> kTiers = {Tier::weak, Tier::average, Tier::good,
                                               Tier::excellent};

[[nodiscard]] constexpr std::string_view tier_name(Tier t) noexcept {
    switch (t) {
        case Tier::weak: return "Weak";
        case Tier::average: return "Average";
        case Tier::good: return "Good";
        case Tier::excellent: return "Excellent";
    }
    return "?";
}

[[nodiscard]] constexpr std::size_t index_of(Tier t) noexcept { return static_cast<std::size_t>(t); }

/// Linear interpolation between order statistics at 1-based rank
/// h = (n - 1) p + 1. `sorted` must be ascending.
[[nodiscard]] inline double quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DataError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile probability outside [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> std;  // sample std (n - 1), absent for n = 1
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

[[nodiscard]] inline DescriptiveStats describe(std::span<const double> sample) {
    if (sample.empty()) throw DataError("cannot describe an empty sample");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    DescriptiveStats d;
    d.n = x.size();
    double sum = 0.0;
    for (double v : sample) sum += v;
    d.mean = sum / static_cast<double>(d.n);
    if (d.n >= 2) {
        double ss = 0.0;
        for (double v : sample) ss += (v - d.mean) * (v - d.mean);
        d.std = std::sqrt(ss / static_cast<double>(d.n - 1));
    }
    d.q1 = quantile(x, 0.25);
    d.median = quantile(x, 0.5);
    d.q3 = quantile(x, 0.75);
    return d;
}

struct TierThresholds {
    Pillar pillar = Pillar::gov;
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;

    friend bool operator==(const TierThresholds&, const TierThresholds&) = default;
};

[[nodiscard]] inline TierThresholds tier_thresholds(Pillar pillar, std::span<const double> baseline) {
    if (baseline.size() < 4) throw DataError("insufficient baseline for quartile thresholds");
    std::vector<double> x(baseline.begin(), baseline.end());
    std::sort(x.begin(), x.end());
    return {pillar, quantile(x, 0.25), quantile(x, 0.5), quantile(x, 0.75)};
}

/// Boundary values belong to the higher tier: score == q1 is Average.
[[nodiscard]] inline Tier assign_tier(double score, const TierThresholds& t) noexcept {
    if (score < t.q1) return Tier::weak;
    if (score < t.q2) return Tier::average;
    if (score < t.q3) return Tier::good;
    return Tier::excellent;
}

/// Everything reported about one pillar's baseline distribution.
struct BaselineReport {
    Pillar pillar = Pillar::gov;
    DescriptiveStats stats;
    std::optional<NormalityResult> shapiro;    // absent when n is out of range
    std::optional<NormalityResult> dagostino;  // absent when n < 20
    TierThresholds thresholds;

    /// Normal only if every applicable test keeps the null at 5%.
    [[nodiscard]] bool approximately_normal() const noexcept {
        if (!shapiro && !dagostino) return false;
        return (!shapiro || shapiro->normal_at_5pct) && (!dagostino || dagostino->normal_at_5pct);
    }
};

[[nodiscard]] inline BaselineReport baseline_report(Pillar pillar, std::span<const double> scores) {
    BaselineReport r;
    r.pillar = pillar;
    r.stats = describe(scores);
    r.thresholds = tier_thresholds(pillar, scores);
    const auto range = std::minmax_element(scores.begin(), scores.end());
    const bool constant = *range.first == *range.second;
    if (!constant && scores.size() >= 3 && scores.size() <= 5000) r.shapiro = shapiro_wilk(scores);
    if (!constant && scores.size() >= 20) r.dagostino = dagostino_pearson(scores);
    return r;
}

}  // namespace esgbench
