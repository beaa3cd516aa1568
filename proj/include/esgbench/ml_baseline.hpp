#pragma once

// Experimental learning-based comparator: multinomial logistic regression
// with an L2 penalty on the weights, predicting the four tiers from
// question-level scores. Full-batch gradient descent with Armijo
// backtracking from a zero start, so training is deterministic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "esgbench/agreement.hpp"
#include "esgbench/baseline_stats.hpp"
#include "esgbench/error.hpp"
#include "esgbench/rrssv.hpp"

namespace esgbench::ml {

inline constexpr std::size_t kClasses = 4;
inline constexpr double kDefaultLambda = 1.0;

using Matrix = std::vector<std::vector<double>>;  // rows x features; NaN marks a missing cell

/// Weights and biases on the standardized feature axis.
struct LrParams {
    std::array<std::vector<double>, kClasses> weights;  // [class][feature]
    std::array<double, kClasses> bias{};

    static LrParams zeros(std::size_t features) {
        LrParams p;
        for (auto& w : p.weights) w.assign(features, 0.0);
        return p;
    }

    [[nodiscard]] std::size_t features() const noexcept { return weights[0].size(); }

    friend bool operator==(const LrParams&, const LrParams&) = default;
};

struct LrModel {
    LrParams params;
    double lambda = kDefaultLambda;
    std::vector<double> feature_mean;   // training-fold mean, also the imputation value
    std::vector<double> feature_scale;  // training-fold std, 1 for constant features
    std::array<bool, kClasses> class_seen{};
    bool converged = false;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;

    friend bool operator==(const LrModel&, const LrModel&) = default;
};

struct TrainOptions {
    std::size_t max_iterations = 5000;
    double tolerance = 1e-6;  // on the Euclidean gradient norm
};

namespace detail {

inline void softmax(std::array<double, kClasses>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (auto& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (auto& v : z) v /= sum;
}

inline std::array<double, kClasses> logits(const LrParams& p, std::span<const double> x) {
    std::array<double, kClasses> z{};
    for (std::size_t k = 0; k < kClasses; ++k) {
        double s = p.bias[k];
        for (std::size_t j = 0; j < x.size(); ++j) s += p.weights[k][j] * x[j];
        z[k] = s;
    }
    return z;
}

inline void check_shapes(const LrParams& p, const Matrix& x, std::span<const Tier> y) {
    if (x.size() != y.size()) throw DataError("feature rows and labels differ in count");
    for (const auto& row : x) {
        if (row.size() != p.features()) throw DataError("feature row dimension mismatch");
    }
}

}  // namespace detail

/// Mean multinomial cross-entropy plus (lambda / 2) ||W||^2; biases are not
/// penalized.
[[nodiscard]] inline double objective(const LrParams& p, const Matrix& x, std::span<const Tier> y,
                                      double lambda) {
    detail::check_shapes(p, x, y);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto z = detail::logits(p, x[i]);
        const double m = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - m);
        loss += m + std::log(sum) - z[index_of(y[i])];
    }
    if (!x.empty()) loss /= static_cast<double>(x.size());
    double sq = 0.0;
    for (const auto& w : p.weights) {
        for (double v : w) sq += v * v;
    }
    return loss + 0.5 * lambda * sq;
}

/// Analytic gradient of `objective`.
[[nodiscard]] inline LrParams nll_gradient(const LrParams& p, const Matrix& x, std::span<const Tier> y,
                                           double lambda) {
    detail::check_shapes(p, x, y);
    auto g = LrParams::zeros(p.features());
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto prob = detail::logits(p, x[i]);
        detail::softmax(prob);
        prob[index_of(y[i])] -= 1.0;
        for (std::size_t k = 0; k < kClasses; ++k) {
            g.bias[k] += prob[k];
            for (std::size_t j = 0; j < x[i].size(); ++j) g.weights[k][j] += prob[k] * x[i][j];
        }
    }
    const double inv_n = x.empty() ? 0.0 : 1.0 / static_cast<double>(x.size());
    for (std::size_t k = 0; k < kClasses; ++k) {
        g.bias[k] *= inv_n;
        for (std::size_t j = 0; j < p.features(); ++j) {
            g.weights[k][j] = g.weights[k][j] * inv_n + lambda * p.weights[k][j];
        }
    }
    return g;
}

[[nodiscard]] inline double squared_norm(const LrParams& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < kClasses; ++k) {
        s += g.bias[k] * g.bias[k];
        for (double v : g.weights[k]) s += v * v;
    }
    return s;
}

/// Gradient descent with backtracking (halving until the Armijo condition
/// holds) on already standardized data. Weight steps are scaled by
/// 1 / (1 + lambda), a diagonal preconditioner that keeps large penalties
/// from starving the unpenalized biases.
[[nodiscard]] inline LrParams minimize(LrParams p, const Matrix& x, std::span<const Tier> y, double lambda,
                                       const TrainOptions& opts, bool& converged, std::size_t& iterations,
                                       double& grad_norm) {
    constexpr double armijo = 1e-4;
    const double precond = 1.0 / (1.0 + lambda);
    double step = 1.0;
    double f = objective(p, x, y, lambda);
    converged = false;
    iterations = 0;
    for (; iterations < opts.max_iterations; ++iterations) {
        const auto g = nll_gradient(p, x, y, lambda);
        const double gg = squared_norm(g);
        grad_norm = std::sqrt(gg);
        if (grad_norm < opts.tolerance) {
            converged = true;
            return p;
        }
        double gd = 0.0;
        for (std::size_t k = 0; k < kClasses; ++k) {
            gd += g.bias[k] * g.bias[k];
            for (double v : g.weights[k]) gd += v * v * precond;
        }
        step = std::min(step * 2.0, 1e4);
        for (;;) {
            LrParams trial = p;
            for (std::size_t k = 0; k < kClasses; ++k) {
                trial.bias[k] -= step * g.bias[k];
                for (std::size_t j = 0; j < p.features(); ++j) {
                    trial.weights[k][j] -= step * precond * g.weights[k][j];
                }
            }
            const double ft = objective(trial, x, y, lambda);
            if (ft <= f - armijo * step * gd) {
                p = std::move(trial);
                f = ft;
                break;
            }
            step /= 2.0;
            if (step < 1e-20) return p;  // no further decrease representable
        }
    }
    grad_norm = std::sqrt(squared_norm(nll_gradient(p, x, y, lambda)));
    converged = grad_norm < opts.tolerance;
    return p;
}

/// Replace missing cells by the column mean and standardize with the given
/// statistics.
[[nodiscard]] inline std::vector<double> prepare_row(std::span<const double> row,
                                                     const std::vector<double>& mean,
                                                     const std::vector<double>& scale) {
    if (row.size() != mean.size()) throw DataError("feature row dimension mismatch");
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double v = std::isnan(row[j]) ? mean[j] : row[j];
        out[j] = (v - mean[j]) / scale[j];
    }
    return out;
}

[[nodiscard]] inline LrModel train(const Matrix& features, std::span<const Tier> labels,
                                   double lambda = kDefaultLambda, const TrainOptions& opts = {}) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");
    if (features.size() != labels.size()) throw DataError("feature rows and labels differ in count");
    if (features.empty()) throw DataError("cannot train on an empty fold");
    const std::size_t d = features.front().size();
    for (const auto& row : features) {
        if (row.size() != d) throw DataError("ragged feature matrix");
        for (double v : row) {
            if (std::isinf(v)) throw DataError("non-finite feature value");
        }
    }

    LrModel m;
    m.lambda = lambda;
    m.feature_mean.assign(d, 0.0);
    m.feature_scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        std::size_t cnt = 0;
        for (const auto& row : features) {
            if (!std::isnan(row[j])) {
                sum += row[j];
                ++cnt;
            }
        }
        const double mean = cnt ? sum / static_cast<double>(cnt) : 0.0;
        double ss = 0.0;
        for (const auto& row : features) {
            const double v = std::isnan(row[j]) ? mean : row[j];
            ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(features.size()));
        m.feature_mean[j] = mean;
        m.feature_scale[j] = sd > 0.0 ? sd : 1.0;
    }
    Matrix x;
    x.reserve(features.size());
    for (const auto& row : features) x.push_back(prepare_row(row, m.feature_mean, m.feature_scale));
    for (Tier t : labels) m.class_seen[index_of(t)] = true;

    m.params = minimize(LrParams::zeros(d), x, labels, lambda, opts, m.converged, m.iterations,
                        m.gradient_norm);
    return m;
}

struct Prediction {
    Tier tier = Tier::weak;
    std::array<double, kClasses> probabilities{};
};

/// Softmax probabilities; ties in the argmax go to the lower tier.
[[nodiscard]] inline Prediction predict(const LrModel& model, std::span<const double> row) {
    if (row.size() != model.params.features()) throw DataError("feature row dimension mismatch");
    const auto x = prepare_row(row, model.feature_mean, model.feature_scale);
    Prediction out;
    out.probabilities = detail::logits(model.params, x);
    detail::softmax(out.probabilities);
    std::size_t best = 0;
    for (std::size_t k = 1; k < kClasses; ++k) {
        if (out.probabilities[k] > out.probabilities[best]) best = k;
    }
    out.tier = kTiers[best];
    return out;
}

/// One train/test problem inside a split.
struct MlTask {
    Matrix train_x;
    std::vector<Tier> train_y;
    Matrix test_x;
    std::vector<Tier> test_y;
};

using FoldBuilder = std::function<std::vector<MlTask>(const SplitPlan&)>;

/// Per seed: train every task of the fold, predict its test rows, and score
/// the pooled predictions with accuracy and macro-F1.
[[nodiscard]] inline RrssvReport evaluate_ml(const std::vector<std::string>& countries,
                                             std::vector<std::uint64_t> seeds, double fraction,
                                             const FoldBuilder& build, double lambda = kDefaultLambda,
                                             unsigned threads = 1, const TrainOptions& opts = {}) {
    return run_rrssv(
        countries, std::move(seeds), fraction,
        [&](const SplitPlan& plan) {
            std::vector<Tier> truth;
            std::vector<Tier> predicted;
            double tasks = 0.0;
            double converged = 0.0;
            double unseen = 0.0;
            for (const auto& task : build(plan)) {
                if (task.train_x.empty() || task.test_x.empty()) continue;
                const auto model = train(task.train_x, task.train_y, lambda, opts);
                tasks += 1.0;
                if (model.converged) converged += 1.0;
                for (bool seen : model.class_seen) {
                    if (!seen) unseen += 1.0;
                }
                for (std::size_t i = 0; i < task.test_x.size(); ++i) {
                    truth.push_back(task.test_y[i]);
                    predicted.push_back(predict(model, task.test_x[i]).tier);
                }
            }
            SeedMetrics m;
            if (truth.empty()) {
                m["accuracy"] = std::nan("");
                m["macro_f1"] = std::nan("");
            } else {
                const auto c = categorical_metrics(truth, predicted);
                m["accuracy"] = c.accuracy;
                m["macro_f1"] = c.macro_f1;
            }
            m["converged_fraction"] = tasks > 0.0 ? converged / tasks : std::nan("");
            m["unseen_classes"] = unseen;
            return m;
        },
        threads);
}

struct LabeledExample {
    std::string country;
    std::vector<double> features;
    Tier label = Tier::weak;
};

/// Fixed-label convenience: train on the baseline countries' examples and
/// test on the held-out ones.
[[nodiscard]] inline RrssvReport evaluate_ml(const std::vector<LabeledExample>& examples,
                                             std::vector<std::uint64_t> seeds, double fraction,
                                             double lambda = kDefaultLambda, unsigned threads = 1,
                                             const TrainOptions& opts = {}) {
    std::vector<std::string> countries;
    for (const auto& e : examples) countries.push_back(e.country);
    std::sort(countries.begin(), countries.end());
    countries.erase(std::unique(countries.begin(), countries.end()), countries.end());
    const FoldBuilder build = [&](const SplitPlan& plan) {
        MlTask task;
        for (const auto& e : examples) {
            const bool in_baseline = std::binary_search(plan.baseline_countries.begin(),
                                                        plan.baseline_countries.end(), e.country);
            (in_baseline ? task.train_x : task.test_x).push_back(e.features);
            (in_baseline ? task.train_y : task.test_y).push_back(e.label);
        }
        return std::vector<MlTask>{std::move(task)};
    };
    return evaluate_ml(countries, std::move(seeds), fraction, build, lambda, threads, opts);
}

}  // namespace esgbench::ml
