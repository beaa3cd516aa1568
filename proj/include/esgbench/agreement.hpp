#pragma once

// Agreement between baseline and workflow scores: continuous error metrics,
// rank correlation, categorical agreement on tiers, per-tier mean
// differences, and Krippendorff's alpha for rubric ratings.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "esgbench/baseline_stats.hpp"
#include "esgbench/error.hpp"
#include "esgbench/taxonomy.hpp"

namespace esgbench {

struct ScorePair {
    std::string country;
    double baseline = 0.0;
    double workflow = 0.0;
};

struct PairedScores {
    Pillar pillar = Pillar::gov;
    std::vector<ScorePair> pairs;

    void validate() const {
        std::set<std::string> seen;
        for (const auto& p : pairs) {
            if (!seen.insert(p.country).second) throw DataError("duplicate country " + p.country);
            if (!std::isfinite(p.baseline) || !std::isfinite(p.workflow)) {
                throw DataError("non-finite score for country " + p.country);
            }
        }
    }
};

struct ErrorMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double bias = 0.0;  // mean of workflow - baseline
};

[[nodiscard]] inline ErrorMetrics error_metrics(std::span<const double> baseline,
                                                std::span<const double> workflow) {
    if (baseline.size() != workflow.size()) throw DataError("paired vectors differ in length");
    if (baseline.empty()) throw DataError("error metrics need at least one pair");
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        const double d = workflow[i] - baseline[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        sum += d;
    }
    const double n = static_cast<double>(baseline.size());
    return {abs_sum / n, std::sqrt(sq_sum / n), sum / n};
}

[[nodiscard]] inline ErrorMetrics error_metrics(const PairedScores& paired) {
    paired.validate();
    std::vector<double> b;
    std::vector<double> w;
    for (const auto& p : paired.pairs) {
        b.push_back(p.baseline);
        w.push_back(p.workflow);
    }
    return error_metrics(b, w);
}

/// 1-based ranks, ties receive the average of the ranks they span.
[[nodiscard]] inline std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

[[nodiscard]] inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("paired vectors differ in length");
    if (x.size() < 2) throw DataError("correlation needs at least 2 pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw DataError("undefined correlation: constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

[[nodiscard]] inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("paired vectors differ in length");
    if (x.size() < 2) throw DataError("correlation needs at least 2 pairs");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

struct CategoricalMetrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double cohen_kappa = 0.0;
    bool kappa_degenerate = false;     // chance agreement was 1
    std::vector<Tier> absent_classes;  // in neither list, counted as F1 = 0
};

/// Accuracy, macro-F1 over `classes` and Cohen's kappa of two label lists.
[[nodiscard]] inline CategoricalMetrics categorical_metrics(std::span<const Tier> a,
                                                            std::span<const Tier> b,
                                                            std::span<const Tier> classes = kTiers) {
    if (a.size() != b.size()) throw DataError("label lists differ in length");
    if (a.empty()) throw DataError("categorical metrics need at least one label");
    auto in_classes = [&](Tier t) { return std::find(classes.begin(), classes.end(), t) != classes.end(); };
    std::array<double, 4> count_a{};
    std::array<double, 4> count_b{};
    std::array<double, 4> hits{};
    double agree = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!in_classes(a[i]) || !in_classes(b[i])) throw DataError("label outside the class set");
        count_a[index_of(a[i])] += 1.0;
        count_b[index_of(b[i])] += 1.0;
        if (a[i] == b[i]) {
            agree += 1.0;
            hits[index_of(a[i])] += 1.0;
        }
    }
    const double n = static_cast<double>(a.size());
    CategoricalMetrics m;
    m.accuracy = agree / n;

    double f1_sum = 0.0;
    for (Tier t : classes) {
        const auto k = index_of(t);
        const double denom = count_a[k] + count_b[k];
        if (denom == 0.0) {
            m.absent_classes.push_back(t);
            continue;
        }
        f1_sum += 2.0 * hits[k] / denom;
    }
    m.macro_f1 = f1_sum / static_cast<double>(classes.size());

    double pe = 0.0;
    for (Tier t : classes) pe += (count_a[index_of(t)] / n) * (count_b[index_of(t)] / n);
    const double po = m.accuracy;
    if (pe >= 1.0) {
        m.kappa_degenerate = true;
        m.cohen_kappa = po >= 1.0 ? 1.0 : 0.0;
    } else {
        m.cohen_kappa = (po - pe) / (1.0 - pe);
    }
    return m;
}

/// Raters x items ordinal ratings in 1..5; absent entries allowed.
struct RatingsMatrix {
    std::vector<std::string> raters;
    std::vector<std::string> items;
    std::vector<std::vector<std::optional<int>>> ratings;  // [rater][item]

    void validate() const {
        if (ratings.size() != raters.size()) throw DataError("ratings matrix rater count mismatch");
        for (std::size_t r = 0; r < ratings.size(); ++r) {
            if (ratings[r].size() != items.size()) throw DataError("ratings matrix item count mismatch");
            for (std::size_t i = 0; i < items.size(); ++i) {
                const auto& v = ratings[r][i];
                if (v && (*v < 1 || *v > 5)) {
                    throw DataError("rating outside 1..5 by rater " + raters[r] + " on item " + items[i]);
                }
            }
        }
    }
};

/// Krippendorff's alpha with the ordinal difference function, from the
/// coincidence matrix of pairable values (items with >= 2 ratings).
[[nodiscard]] inline double krippendorff_alpha(const RatingsMatrix& m) {
    m.validate();
    constexpr int kValues = 5;
    std::array<std::array<double, kValues>, kValues> coincidence{};
    std::size_t pairable_items = 0;
    for (std::size_t i = 0; i < m.items.size(); ++i) {
        std::vector<int> vals;
        for (const auto& row : m.ratings) {
            if (row[i]) vals.push_back(*row[i]);
        }
        if (vals.size() < 2) continue;
        ++pairable_items;
        const double w = 1.0 / static_cast<double>(vals.size() - 1);
        for (std::size_t p = 0; p < vals.size(); ++p) {
            for (std::size_t q = 0; q < vals.size(); ++q) {
                if (p != q) coincidence[vals[p] - 1][vals[q] - 1] += w;
            }
        }
    }
    if (pairable_items < 2) throw DataError("alpha undefined: fewer than 2 items with 2+ ratings");

    std::array<double, kValues> marginal{};
    double total = 0.0;
    for (int c = 0; c < kValues; ++c) {
        for (int k = 0; k < kValues; ++k) marginal[c] += coincidence[c][k];
        total += marginal[c];
    }
    auto delta2 = [&](int c, int k) {
        if (c > k) std::swap(c, k);
        double s = 0.0;
        for (int g = c; g <= k; ++g) s += marginal[g];
        s -= (marginal[c] + marginal[k]) / 2.0;
        return s * s;
    };
    double observed = 0.0;
    double expected = 0.0;
    for (int c = 0; c < kValues; ++c) {
        for (int k = 0; k < kValues; ++k) {
            if (c == k) continue;
            const double d = delta2(c, k);
            observed += coincidence[c][k] * d;
            expected += marginal[c] * marginal[k] * d;
        }
    }
    if (!(expected > 0.0)) throw DataError("alpha undefined: no variation in ratings");
    return 1.0 - (total - 1.0) * observed / expected;
}

struct TierDiffRow {
    Pillar pillar = Pillar::gov;
    Tier tier = Tier::weak;
    std::size_t baseline_n = 0;
    std::size_t workflow_n = 0;
    std::optional<double> baseline_mean;
    std::optional<double> workflow_mean;

    /// Workflow minus baseline; absent unless both tiers have members.
    [[nodiscard]] std::optional<double> diff() const {
        if (!baseline_mean || !workflow_mean) return std::nullopt;
        return *workflow_mean - *baseline_mean;
    }
};

/// Mean baseline and workflow score within each tier, both sets tiered by
/// the same thresholds.
[[nodiscard]] inline std::vector<TierDiffRow> per_tier_diff_table(std::span<const double> baseline,
                                                                  std::span<const double> workflow,
                                                                  const TierThresholds& thresholds) {
    std::array<double, 4> bsum{};
    std::array<double, 4> wsum{};
    std::array<std::size_t, 4> bn{};
    std::array<std::size_t, 4> wn{};
    for (double s : baseline) {
        const auto k = index_of(assign_tier(s, thresholds));
        bsum[k] += s;
        ++bn[k];
    }
    for (double s : workflow) {
        const auto k = index_of(assign_tier(s, thresholds));
        wsum[k] += s;
        ++wn[k];
    }
    std::vector<TierDiffRow> rows;
    for (Tier t : kTiers) {
        const auto k = index_of(t);
        TierDiffRow row{thresholds.pillar, t, bn[k], wn[k], std::nullopt, std::nullopt};
        if (bn[k]) row.baseline_mean = bsum[k] / static_cast<double>(bn[k]);
        if (wn[k]) row.workflow_mean = wsum[k] / static_cast<double>(wn[k]);
        rows.push_back(row);
    }
    return rows;
}

/// All agreement figures of one pillar. `thresholds` is the single
/// instance used to tier both sides.
struct AgreementReport {
    Pillar pillar = Pillar::gov;
    std::size_t n = 0;
    ErrorMetrics errors;
    std::optional<double> spearman_rho;  // absent when a side is constant
    CategoricalMetrics categorical;
    TierThresholds thresholds;
    std::vector<TierDiffRow> per_tier_diffs;
};

[[nodiscard]] inline AgreementReport agreement_report(const PairedScores& paired,
                                                      const TierThresholds& thresholds) {
    paired.validate();
    if (paired.pairs.empty()) throw DataError("agreement needs at least one pair");
    AgreementReport r;
    r.pillar = paired.pillar;
    r.n = paired.pairs.size();
    r.thresholds = thresholds;
    std::vector<double> b;
    std::vector<double> w;
    std::vector<Tier> tb;
    std::vector<Tier> tw;
    for (const auto& p : paired.pairs) {
        b.push_back(p.baseline);
        w.push_back(p.workflow);
        tb.push_back(assign_tier(p.baseline, thresholds));
        tw.push_back(assign_tier(p.workflow, thresholds));
    }
    r.errors = error_metrics(b, w);
    if (b.size() >= 2) {
        try {
            r.spearman_rho = spearman(b, w);
        } catch (const DataError&) {
            r.spearman_rho.reset();
        }
    }
    r.categorical = categorical_metrics(tb, tw);
    return r;
}

}  // namespace esgbench
