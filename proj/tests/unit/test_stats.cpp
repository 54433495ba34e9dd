#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "aqg/errors.hpp"
#include "aqg/stats.hpp"
#include "aqg/text.hpp"

using namespace aqg;

namespace {

double t_density(double x, double df) {
    double log_c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                   0.5 * std::log(df * M_PI);
    return std::exp(log_c - (df + 1.0) / 2.0 * std::log1p(x * x / df));
}

// Simpson's rule from 0 to t; the CDF follows by symmetry around 0.
double t_cdf_by_integration(double t, double df) {
    double sign = t < 0.0 ? -1.0 : 1.0;
    double upper = std::fabs(t);
    const int steps = 4000;  // even
    double h = upper / steps;
    double acc = t_density(0.0, df) + t_density(upper, df);
    for (int i = 1; i < steps; ++i)
        acc += t_density(i * h, df) * (i % 2 == 1 ? 4.0 : 2.0);
    double integral = acc * h / 3.0;
    return 0.5 + sign * integral;
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("t_cdf is exactly one half at zero") {
    for (double df : {1.0, 2.0, 5.0, 30.0, 1000.0}) CHECK(t_cdf(0.0, df) == 0.5);
}

TEST_CASE("t_cdf matches the cauchy closed form at df 1") {
    CHECK(std::abs(t_cdf(1.0, 1.0) - 0.75) < 1e-10);
    for (double t : {-3.0, -0.5, 0.7, 2.0, 10.0})
        CHECK(std::abs(t_cdf(t, 1.0) - (0.5 + std::atan(t) / M_PI)) < 1e-10);
}

TEST_CASE("t_cdf approaches the normal at high df") {
    CHECK(t_cdf(1.96, 1000.0) == doctest::Approx(0.9748).epsilon(0.0001));
}

TEST_CASE("t_cdf agrees with numerical integration over a grid") {
    for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0}) {
        for (double t : {0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
            CAPTURE(df);
            CAPTURE(t);
            CHECK(std::abs(t_cdf(t, df) - t_cdf_by_integration(t, df)) < 1e-8);
            CHECK(std::abs(t_cdf(-t, df) - t_cdf_by_integration(-t, df)) < 1e-8);
        }
    }
}

TEST_CASE("t_cdf symmetry over random arguments") {
    Rng rng(301);
    for (int trial = 0; trial < 300; ++trial) {
        double t = (rng.next_double() - 0.5) * 20.0;
        double df = 1.0 + rng.next_double() * 200.0;
        CHECK(std::abs(t_cdf(t, df) + t_cdf(-t, df) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(t_cdf(1.0, 0.0), UsageError);
    CHECK_THROWS_AS(t_cdf(1.0, -2.0), UsageError);
}

TEST_CASE("incomplete beta identities") {
    CHECK(incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    Rng rng(302);
    for (int trial = 0; trial < 200; ++trial) {
        double a = 0.5 + rng.next_double() * 5.0;
        double b = 0.5 + rng.next_double() * 5.0;
        double x = rng.next_double();
        double lhs = incomplete_beta(a, b, x);
        double rhs = 1.0 - incomplete_beta(b, a, 1.0 - x);
        CHECK(std::abs(lhs - rhs) < 1e-10);
        CHECK(lhs >= 0.0);
        CHECK(lhs <= 1.0);
    }
}

TEST_CASE("pooled t-test worked fixture") {
    auto result = t_test_two_sample({{2.0, 4.0, 6.0}, "a"}, {{1.0, 3.0, 5.0}, "b"});
    CHECK(result.t == doctest::Approx(1.0 / std::sqrt(8.0 / 3.0)).epsilon(1e-12));
    CHECK(result.t == doctest::Approx(0.612).epsilon(0.001));
    CHECK(result.df == 4.0);
    CHECK(result.p_two_sided == doctest::Approx(0.573).epsilon(0.001));
    CHECK(!result.significant);
    CHECK(result.alpha == 0.05);
}

TEST_CASE("well separated samples are significant") {
    auto result = t_test_two_sample({{1.0, 2.0, 3.0}, "a"}, {{101.0, 102.0, 103.0}, "b"});
    CHECK(result.significant);
    CHECK(result.p_two_sided < 0.001);
    CHECK(result.t < 0.0);
}

TEST_CASE("t-test agrees with a from-scratch pooled recomputation") {
    Rng rng(303);
    for (int trial = 0; trial < 100; ++trial) {
        size_t na = 2 + rng.next_below(8);
        size_t nb = 2 + rng.next_below(8);
        std::vector<double> a, b;
        for (size_t i = 0; i < na; ++i) a.push_back(rng.next_gaussian() * 3.0 + 1.0);
        for (size_t i = 0; i < nb; ++i) b.push_back(rng.next_gaussian() * 2.0);

        double ma = sample_mean(a), mb = sample_mean(b);
        double va = sample_variance(a), vb = sample_variance(b);
        double df = double(na + nb - 2);
        double pooled = ((double(na) - 1.0) * va + (double(nb) - 1.0) * vb) / df;
        double se = std::sqrt(pooled * (1.0 / double(na) + 1.0 / double(nb)));
        if (se == 0.0) continue;
        double t = (ma - mb) / se;
        double p = 2.0 * (1.0 - t_cdf_by_integration(std::fabs(t), df));

        auto result = t_test_two_sample({a, "a"}, {b, "b"});
        CHECK(result.t == doctest::Approx(t).epsilon(1e-12));
        CHECK(result.df == df);
        CHECK(std::abs(result.p_two_sided - p) < 1e-8);
        CHECK(result.significant == (result.p_two_sided < 0.05));
    }
}

TEST_CASE("welch variant uses the satterthwaite df") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> b = {10.0, 20.0, 30.0};
    double va = sample_variance(a) / 4.0;
    double vb = sample_variance(b) / 3.0;
    double df = (va + vb) * (va + vb) / (va * va / 3.0 + vb * vb / 2.0);
    double t = (sample_mean(a) - sample_mean(b)) / std::sqrt(va + vb);
    auto result = t_test_two_sample({a, "a"}, {b, "b"}, 0.05, true);
    CHECK(result.t == doctest::Approx(t).epsilon(1e-12));
    CHECK(result.df == doctest::Approx(df).epsilon(1e-12));
    CHECK(std::abs(result.p_two_sided -
                   2.0 * (1.0 - t_cdf_by_integration(std::fabs(t), df))) < 1e-8);
}

TEST_CASE("degenerate samples") {
    auto same = t_test_two_sample({{5.0, 5.0, 5.0}, "a"}, {{5.0, 5.0}, "b"});
    CHECK(same.t == 0.0);
    CHECK(same.p_two_sided == 1.0);
    CHECK(!same.significant);
    CHECK_THROWS_AS(t_test_two_sample({{5.0, 5.0}, "a"}, {{6.0, 6.0}, "b"}), DataError);
}

TEST_CASE("t-test input validation") {
    SampleVector ok{{1.0, 2.0, 3.0}, "ok"};
    CHECK_THROWS_AS(t_test_two_sample({{1.0}, "short"}, ok), DataError);
    CHECK_THROWS_AS(t_test_two_sample(ok, {{}, "empty"}), DataError);
    CHECK_THROWS_AS(
        t_test_two_sample({{1.0, std::numeric_limits<double>::quiet_NaN()}, "nan"}, ok),
        DataError);
    CHECK_THROWS_AS(t_test_two_sample(ok, ok, 0.0), UsageError);
    CHECK_THROWS_AS(t_test_two_sample(ok, ok, 1.0), UsageError);
}

TEST_CASE("weakest baseline picks the lowest mean, ties to first label") {
    std::map<std::string, SampleVector> baselines;
    baselines["bart"] = {{2.0, 2.0}, "bart"};
    baselines["t5"] = {{3.0, 3.0}, "t5"};
    CHECK(weakest_baseline(baselines) == "bart");
    baselines["aaa"] = {{2.0, 2.0}, "aaa"};
    CHECK(weakest_baseline(baselines) == "aaa");
    CHECK_THROWS_AS(weakest_baseline({}), UsageError);
}

TEST_CASE("star rule: higher mean and significant") {
    std::map<std::string, SampleVector> baselines;
    baselines["t5"] = {{10.0, 10.1, 9.9, 10.0}, "t5"};
    baselines["bart"] = {{12.0, 12.1, 11.9, 12.0}, "bart"};

    std::map<std::string, SampleVector> results;
    results["uniform+50"] = {{60.0, 60.1, 59.9, 60.0}, "uniform+50"};
    results["below"] = {{5.0, 5.1, 4.9, 5.0}, "below"};
    results["noise"] = {{10.0, 10.2, 9.8, 10.1}, "noise"};

    auto stars = significance_stars(results, baselines);
    CHECK(stars.at("uniform+50"));
    CHECK(!stars.at("below"));  // separated but lower, never starred
    CHECK(!stars.at("noise"));
}

TEST_CASE("star rule handles perfectly separated constant samples") {
    std::map<std::string, SampleVector> baselines;
    baselines["base"] = {{1.0, 1.0, 1.0}, "base"};
    std::map<std::string, SampleVector> results;
    results["flat-high"] = {{2.0, 2.0, 2.0}, "flat-high"};
    results["flat-equal"] = {{1.0, 1.0, 1.0}, "flat-equal"};
    auto stars = significance_stars(results, baselines);
    CHECK(stars.at("flat-high"));
    CHECK(!stars.at("flat-equal"));
}

TEST_CASE("mean and variance helpers") {
    CHECK(sample_mean({2.0, 4.0, 6.0}) == 4.0);
    CHECK(sample_variance({2.0, 4.0, 6.0}) == 4.0);
    CHECK(sample_variance({7.0, 7.0}) == 0.0);
}

} // TEST_SUITE("stats")
