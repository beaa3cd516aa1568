#pragma once

// Repeated random sub-sampling validation: re-split the country set once
// per seed, evaluate, and summarise every metric as mean and (S - 1)
// standard deviation across seeds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "esgbench/error.hpp"
#include "esgbench/parallel.hpp"
#include "esgbench/rng.hpp"

namespace esgbench {

inline constexpr double kDefaultBaselineFraction = 0.4;
inline constexpr std::size_t kMinBaseline = 4;
inline constexpr std::size_t kMinCountries = 10;
inline constexpr std::size_t kDefaultSeedCount = 20;

struct SplitPlan {
    std::uint64_t seed = 0;
    double fraction = kDefaultBaselineFraction;
    std::vector<std::string> baseline_countries;  // ascending
    std::vector<std::string> holdout_countries;   // ascending

    friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

[[nodiscard]] inline std::size_t baseline_size(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

/// Canonically sort, shuffle with the seeded generator, and take the first
/// round-half-up(fraction * N) countries as the baseline.
[[nodiscard]] inline SplitPlan split_countries(std::vector<std::string> countries, std::uint64_t seed,
                                               double fraction = kDefaultBaselineFraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("baseline fraction must be in (0,1)");
    std::sort(countries.begin(), countries.end());
    if (std::adjacent_find(countries.begin(), countries.end()) != countries.end()) {
        throw DataError("duplicate country in split input");
    }
    const auto k = baseline_size(countries.size(), fraction);
    if (countries.size() < kMinCountries || k < kMinBaseline) {
        throw DataError("insufficient countries for split: " + std::to_string(countries.size()) +
                        " countries give a baseline of " + std::to_string(k));
    }
    SplitRng rng(seed);
    rng.shuffle(countries);
    SplitPlan plan;
    plan.seed = seed;
    plan.fraction = fraction;
    plan.baseline_countries.assign(countries.begin(), countries.begin() + static_cast<std::ptrdiff_t>(k));
    plan.holdout_countries.assign(countries.begin() + static_cast<std::ptrdiff_t>(k), countries.end());
    std::sort(plan.baseline_countries.begin(), plan.baseline_countries.end());
    std::sort(plan.holdout_countries.begin(), plan.holdout_countries.end());
    return plan;
}

/// Seeds 0..count-1.
[[nodiscard]] inline std::vector<std::uint64_t> default_seeds(std::size_t count = kDefaultSeedCount) {
    std::vector<std::uint64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = i;
    return out;
}

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> std;
    std::vector<double> per_seed;  // aligned with RrssvReport::seeds; NaN = undefined
    std::size_t valid = 0;         // finite per-seed values
};

/// Mean and S - 1 standard deviation of the finite values.
[[nodiscard]] inline MetricSummary summarize(std::vector<double> per_seed) {
    MetricSummary s;
    std::vector<double> finite;
    for (double v : per_seed) {
        if (std::isfinite(v)) finite.push_back(v);
    }
    s.per_seed = std::move(per_seed);
    s.valid = finite.size();
    if (finite.size() < 2) return s;
    const double count = static_cast<double>(finite.size());
    double sum = 0.0;
    for (double v : finite) sum += v;
    const double mean = sum / count;
    double ss = 0.0;
    for (double v : finite) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.std = std::sqrt(ss / (count - 1.0));
    return s;
}

struct RrssvReport {
    std::vector<std::uint64_t> seeds;  // ascending
    double fraction = kDefaultBaselineFraction;
    std::map<std::string, MetricSummary> metrics;
};

using SeedMetrics = std::map<std::string, double>;
using SplitEvaluator = std::function<SeedMetrics(const SplitPlan&)>;

/// Evaluate every seed's split and aggregate. Seeds are processed in
/// ascending order for aggregation, so the report does not depend on the
/// order seeds were given in or on the thread count.
[[nodiscard]] inline RrssvReport run_rrssv(const std::vector<std::string>& countries,
                                           std::vector<std::uint64_t> seeds, double fraction,
                                           const SplitEvaluator& evaluate, unsigned threads = 1) {
    if (seeds.size() < 2) throw ValidationError("S-1 undefined: repeated sub-sampling needs >= 2 seeds");
    std::sort(seeds.begin(), seeds.end());
    if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end()) {
        throw ValidationError("duplicate seed in seed list");
    }
    std::vector<SeedMetrics> results(seeds.size());
    parallel_for(seeds.size(), threads, [&](std::size_t i) {
        try {
            results[i] = evaluate(split_countries(countries, seeds[i], fraction));
        } catch (const Error& e) {
            Error wrapped(e.kind(), "seed " + std::to_string(seeds[i]) + ": " + e.what());
            throw wrapped;
        }
    });

    std::set<std::string> names;
    for (const auto& r : results) {
        for (const auto& [k, v] : r) names.insert(k);
    }
    RrssvReport report;
    report.seeds = seeds;
    report.fraction = fraction;
    for (const auto& name : names) {
        std::vector<double> values;
        values.reserve(results.size());
        for (const auto& r : results) {
            const auto it = r.find(name);
            values.push_back(it == r.end() ? std::nan("") : it->second);
        }
        report.metrics.emplace(name, summarize(std::move(values)));
    }
    return report;
}

}  // namespace esgbench
