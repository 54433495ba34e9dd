#include "aqg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "aqg/errors.hpp"

namespace aqg {

double sample_mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = sample_mean(values);
    double sum_sq = 0.0;
    for (double v : values) sum_sq += (v - mean) * (v - mean);
    return sum_sq / static_cast<double>(values.size() - 1);
}

namespace {

constexpr double kBetaTol = 1e-12;
constexpr int kBetaMaxIter = 300;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double kFpMin = 1e-300;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kBetaTol) return h;
    }
    return h;  // converged to working precision in practice well before the cap
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw UsageError("incomplete_beta requires a, b > 0");
    if (x < 0.0 || x > 1.0) throw UsageError("incomplete_beta requires x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_cdf(double t, double df) {
    if (df <= 0.0) throw UsageError("t_cdf requires df > 0");
    if (t == 0.0) return 0.5;
    double x = df / (df + t * t);
    double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

TestResult t_test_two_sample(const SampleVector& a, const SampleVector& b, double alpha,
                             bool welch) {
    if (a.values.size() < 2 || b.values.size() < 2)
        throw DataError("t_test_two_sample requires at least 2 values per sample");
    for (double v : a.values)
        if (!std::isfinite(v)) throw DataError("non-finite value in sample '" + a.label + "'");
    for (double v : b.values)
        if (!std::isfinite(v)) throw DataError("non-finite value in sample '" + b.label + "'");
    if (alpha <= 0.0 || alpha >= 1.0) throw UsageError("alpha must be in (0,1)");

    double na = static_cast<double>(a.values.size());
    double nb = static_cast<double>(b.values.size());
    double ma = sample_mean(a.values);
    double mb = sample_mean(b.values);
    double va = sample_variance(a.values);
    double vb = sample_variance(b.values);

    TestResult result;
    result.alpha = alpha;
    double se;
    if (welch) {
        double ta = va / na;
        double tb = vb / nb;
        se = std::sqrt(ta + tb);
        result.df = se == 0.0 ? na + nb - 2.0
                              : (ta + tb) * (ta + tb) /
                                    (ta * ta / (na - 1.0) + tb * tb / (nb - 1.0));
    } else {
        double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        result.df = na + nb - 2.0;
    }

    if (se == 0.0) {
        if (ma != mb)
            throw DataError("degenerate samples: zero variance with unequal means ('" + a.label +
                            "' vs '" + b.label + "')");
        result.t = 0.0;
        result.p_two_sided = 1.0;
        result.significant = false;
        return result;
    }
    result.t = (ma - mb) / se;
    result.p_two_sided = std::clamp(2.0 * (1.0 - t_cdf(std::fabs(result.t), result.df)), 0.0, 1.0);
    result.significant = result.p_two_sided < alpha;
    return result;
}

std::string weakest_baseline(const std::map<std::string, SampleVector>& baselines) {
    if (baselines.empty()) throw UsageError("significance testing requires at least one baseline");
    std::string weakest;
    double lowest = 0.0;
    for (const auto& [label, sample] : baselines) {
        double mean = sample_mean(sample.values);
        if (weakest.empty() || mean < lowest) {
            weakest = label;
            lowest = mean;
        }
    }
    return weakest;
}

std::map<std::string, bool> significance_stars(
    const std::map<std::string, SampleVector>& results,
    const std::map<std::string, SampleVector>& baselines, double alpha) {
    std::string weakest = weakest_baseline(baselines);
    const SampleVector& base = baselines.at(weakest);
    double base_mean = sample_mean(base.values);

    std::map<std::string, bool> stars;
    for (const auto& [label, sample] : results) {
        double mean = sample_mean(sample.values);
        if (mean <= base_mean) {
            stars[label] = false;
            continue;
        }
        try {
            stars[label] = t_test_two_sample(sample, base, alpha).significant;
        } catch (const DataError&) {
            // Zero variance on both sides with distinct means: perfectly
            // separated samples, the higher mean earns the star.
            stars[label] = true;
        }
    }
    return stars;
}

} // namespace aqg
