#pragma once

// Straightforward re-derivations of the agreement metrics, written from
// their textbook definitions rather than from the library code.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "esgbench/agreement.hpp"

namespace oracle {

using esgbench::Tier;

inline double kappa(const std::vector<Tier>& a, const std::vector<Tier>& b) {
    double confusion[4][4] = {};
    for (std::size_t i = 0; i < a.size(); ++i) confusion[esgbench::index_of(a[i])][esgbench::index_of(b[i])] += 1;
    const double n = static_cast<double>(a.size());
    double po = 0;
    double pe = 0;
    for (int i = 0; i < 4; ++i) {
        po += confusion[i][i] / n;
        double row = 0;
        double col = 0;
        for (int j = 0; j < 4; ++j) {
            row += confusion[i][j];
            col += confusion[j][i];
        }
        pe += row * col / (n * n);
    }
    if (pe == 1.0) return po == 1.0 ? 1.0 : 0.0;
    return (po - pe) / (1 - pe);
}

inline double macro_f1(const std::vector<Tier>& a, const std::vector<Tier>& b, const std::vector<Tier>& classes) {
    double total = 0;
    for (Tier c : classes) {
        double tp = 0;
        double fp = 0;
        double fn = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == c && b[i] == c) tp += 1;
            if (a[i] != c && b[i] == c) fp += 1;
            if (a[i] == c && b[i] != c) fn += 1;
        }
        if (tp == 0) continue;
        const double precision = tp / (tp + fp);
        const double recall = tp / (tp + fn);
        total += 2 * precision * recall / (precision + recall);
    }
    return total / static_cast<double>(classes.size());
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0;
            double equal = 0;
            for (double w : v) {
                if (w < v[i]) less += 1;
                if (w == v[i]) equal += 1;
            }
            r[i] = less + (equal + 1) / 2;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i] / n;
        my += ry[i] / n;
    }
    double sxy = 0;
    double sxx = 0;
    double syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Pairwise form: D_o averages disagreement over rater pairs within each
/// item, D_e over all pairs of pairable values.
inline std::optional<double> alpha(const esgbench::RatingsMatrix& m) {
    std::vector<std::vector<int>> units;
    std::array<double, 6> counts{};
    double n = 0;
    for (std::size_t i = 0; i < m.items.size(); ++i) {
        std::vector<int> vals;
        for (const auto& row : m.ratings) {
            if (row[i]) vals.push_back(*row[i]);
        }
        if (vals.size() < 2) continue;
        for (int v : vals) counts[static_cast<std::size_t>(v)] += 1;
        n += static_cast<double>(vals.size());
        units.push_back(vals);
    }
    if (units.size() < 2) return std::nullopt;
    auto delta = [&](int c, int k) {
        if (c == k) return 0.0;
        if (c > k) std::swap(c, k);
        double s = 0;
        for (int g = c; g <= k; ++g) s += counts[static_cast<std::size_t>(g)];
        s -= (counts[static_cast<std::size_t>(c)] + counts[static_cast<std::size_t>(k)]) / 2;
        return s * s;
    };
    double observed = 0;
    for (const auto& u : units) {
        double within = 0;
        for (std::size_t p = 0; p < u.size(); ++p) {
            for (std::size_t q = 0; q < u.size(); ++q) {
                if (p != q) within += delta(u[p], u[q]);
            }
        }
        observed += within / static_cast<double>(u.size() - 1);
    }
    observed /= n;
    std::vector<int> pool;
    for (const auto& u : units) pool.insert(pool.end(), u.begin(), u.end());
    double expected = 0;
    for (std::size_t p = 0; p < pool.size(); ++p) {
        for (std::size_t q = 0; q < pool.size(); ++q) {
            if (p != q) expected += delta(pool[p], pool[q]);
        }
    }
    expected /= n * (n - 1);
    if (expected == 0) return std::nullopt;
    return 1 - observed / expected;
}

/// Calls fn with every vector of length `len` over `alphabet`.
template <typename T>
void enumerate(const std::vector<T>& alphabet, std::size_t len, const std::function<void(const std::vector<T>&)>& fn) {
    std::vector<std::size_t> digits(len, 0);
    std::vector<T> v(len);
    for (;;) {
        for (std::size_t i = 0; i < len; ++i) v[i] = alphabet[digits[i]];
        fn(v);
        std::size_t i = 0;
        while (i < len && ++digits[i] == alphabet.size()) digits[i++] = 0;
        if (i == len) return;
    }
}

}  // namespace oracle

namespace paper {

struct OverlayRow {
    esgbench::Pillar pillar;
    esgbench::Tier tier;
    double baseline, workflow, diff;
};

// Published per-tier means, one row per group and tier.
inline const std::vector<OverlayRow>& overlay_table() {
    using esgbench::Pillar;
    using esgbench::Tier;
    static const std::vector<OverlayRow> rows = {
        {Pillar::gov, Tier::weak, 2.033, 1.997, -0.036},     {Pillar::gov, Tier::average, 3.279, 3.194, -0.085},
        {Pillar::gov, Tier::good, 5.112, 4.945, -0.167},     {Pillar::gov, Tier::excellent, 7.504, 7.584, 0.080},
        {Pillar::ene, Tier::weak, 1.353, 1.288, -0.065},     {Pillar::ene, Tier::average, 1.976, 2.074, 0.098},
        {Pillar::ene, Tier::good, 4.224, 4.814, 0.590},      {Pillar::ene, Tier::excellent, 7.676, 8.211, 0.535},
        {Pillar::bio, Tier::weak, 1.198, 1.251, 0.053},      {Pillar::bio, Tier::average, 1.697, 1.708, 0.011},
        {Pillar::bio, Tier::good, 5.908, 6.557, 0.649},      {Pillar::bio, Tier::excellent, 8.949, 8.979, 0.030},
        {Pillar::cli, Tier::weak, 1.290, 1.326, 0.036},      {Pillar::cli, Tier::average, 1.760, 1.813, 0.053},
        {Pillar::cli, Tier::good, 3.964, 3.474, -0.490},     {Pillar::cli, Tier::excellent, 6.559, 6.820, 0.261},
    };
    return rows;
}

}  // namespace paper
