#pragma once

// Normality tests used on the baseline score distributions:
//   Shapiro-Wilk W with Royston's p-value approximation (Applied Statistics
//   algorithm AS R94, uncensored case), 3 <= n <= 5000.
//   D'Agostino-Pearson K^2 omnibus test from the skewness and kurtosis
//   z-scores, n >= 20, p from chi-square with 2 degrees of freedom.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "esgbench/error.hpp"

namespace esgbench {

enum class NormalityTest { shapiro_wilk, dagostino_pearson };

[[nodiscard]] constexpr std::string_view test_name(NormalityTest t) noexcept {
    return t == NormalityTest::shapiro_wilk ? "Shapiro-Wilk" : "D'Agostino-Pearson";
}

struct NormalityResult {
    NormalityTest test = NormalityTest::shapiro_wilk;
    double statistic = 0.0;
    double p_value = 1.0;
    bool normal_at_5pct = true;  // p_value > 0.05
};

namespace detail {

template <std::size_t N>
[[nodiscard]] inline double poly(const double (&c)[N], double x) noexcept {
    double r = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) r = r * x + c[i];
    return r;
}

/// Upper tail of the standard normal.
[[nodiscard]] inline double normal_sf(double z) noexcept {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

/// Inverse standard normal CDF, Wichura's AS 241 (PPND16), about 1e-16
/// relative accuracy.
[[nodiscard]] inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DataError("normal quantile outside (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                     67265.770927008700853) * r + 45921.953931549871457) * r +
                   13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                     39307.89580009271061) * r + 21213.794301586595867) * r +
                   5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                    0.24178072517745061177) * r + 1.27045825245236838258) * r +
                  3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                    0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                  0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                  0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                    1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                  0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

/// Royston's polynomial approximation to the Shapiro-Wilk coefficients for
/// the upper half of the order statistics (a[0] pairs x(n) with x(1)).
[[nodiscard]] inline std::vector<double> shapiro_wilk_coefficients(std::size_t n) {
    constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::sqrt(0.5);
        return a;
    }
    const double an = static_cast<double>(n);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - a[0] / ssumm2;
    std::size_t first_rescaled;
    double fac;
    if (n > 5) {
        const double a2 = -a[1] / ssumm2 + poly(c2, rsn);
        fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                        (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[0] = a1;
        a[1] = a2;
        first_rescaled = 2;
    } else {
        fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
        a[0] = a1;
        first_rescaled = 1;
    }
    for (std::size_t i = first_rescaled; i < half; ++i) a[i] = -a[i] / fac;
    return a;
}

}  // namespace detail

[[nodiscard]] inline NormalityResult shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 5000) throw DataError("Shapiro-Wilk needs 3 <= n <= 5000");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range >= 1e-19)) throw DataError("Shapiro-Wilk: sample has zero range");

    const auto half_coef = detail::shapiro_wilk_coefficients(n);
    std::vector<double> a(n, 0.0);
    for (std::size_t i = 0; i < half_coef.size(); ++i) {
        a[n - 1 - i] = half_coef[i];
        a[i] = -half_coef[i];
    }

    // W as the squared correlation of the coefficients with the range-scaled
    // ordered sample; 1 - W is formed directly to avoid cancellation.
    double sa = 0.0;
    double sx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += a[i];
        sx += x[i] / range;
    }
    sa /= static_cast<double>(n);
    sx /= static_cast<double>(n);
    double ssa = 0.0;
    double ssx = 0.0;
    double sax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double asa = a[i] - sa;
        const double xsx = x[i] / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    const double ssassx = std::sqrt(ssa * ssx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    const double w = 1.0 - w1;

    NormalityResult res{NormalityTest::shapiro_wilk, w, 1.0, true};
    const double an = static_cast<double>(n);
    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        const double stqr = std::asin(std::sqrt(0.75));
        res.p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    } else {
        constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
        constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
        constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
        constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
        constexpr double g[] = {-2.273, 0.459};
        double y = std::log(w1);
        double m;
        double s;
        bool tiny = false;
        if (n <= 11) {
            const double gamma = detail::poly(g, an);
            if (y >= gamma) {
                tiny = true;
            } else {
                y = -std::log(gamma - y);
            }
            m = detail::poly(c3, an);
            s = std::exp(detail::poly(c4, an));
        } else {
            const double xx = std::log(an);
            m = detail::poly(c5, xx);
            s = std::exp(detail::poly(c6, xx));
        }
        res.p_value = tiny ? 1e-19 : detail::normal_sf((y - m) / s);
    }
    res.normal_at_5pct = res.p_value > 0.05;
    return res;
}

struct MomentZScores {
    double skew_z = 0.0;
    double kurtosis_z = 0.0;
};

/// The two z-scores combined by the omnibus test (sample skewness and
/// kurtosis with population-moment definitions).
[[nodiscard]] inline MomentZScores dagostino_z_scores(std::span<const double> sample) {
    const std::size_t count = sample.size();
    if (count < 20) throw DataError("D'Agostino-Pearson needs n >= 20");
    const double n = static_cast<double>(count);
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : sample) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw DataError("D'Agostino-Pearson: sample has zero variance");
    const double b1 = m3 / std::pow(m2, 1.5);
    const double b2 = m4 / (m2 * m2);

    MomentZScores z;
    {
        double y = b1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
        const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                             ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
        const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
        const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
        const double alpha = std::sqrt(2.0 / (w2 - 1.0));
        if (y == 0.0) y = 1.0;
        const double ya = y / alpha;
        z.skew_z = delta * std::log(ya + std::sqrt(ya * ya + 1.0));
    }
    {
        const double e = 3.0 * (n - 1.0) / (n + 1.0);
        const double varb2 = 24.0 * n * (n - 2.0) * (n - 3.0) /
                             ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
        const double x = (b2 - e) / std::sqrt(varb2);
        const double sqrtbeta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                                 std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
        const double a = 6.0 + 8.0 / sqrtbeta1 *
                                   (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
        const double term1 = 1.0 - 2.0 / (9.0 * a);
        const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
        if (denom == 0.0) throw DataError("D'Agostino-Pearson: kurtosis transform undefined");
        const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
        z.kurtosis_z = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
    }
    return z;
}

[[nodiscard]] inline NormalityResult dagostino_pearson(std::span<const double> sample) {
    const auto z = dagostino_z_scores(sample);
    const double k2 = z.skew_z * z.skew_z + z.kurtosis_z * z.kurtosis_z;
    NormalityResult res{NormalityTest::dagostino_pearson, k2, std::exp(-k2 / 2.0), true};
    res.normal_at_5pct = res.p_value > 0.05;
    return res;
}

}  // namespace esgbench
