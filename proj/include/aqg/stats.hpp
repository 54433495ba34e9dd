#pragma once

#include <map>
#include <string>
#include <vector>

namespace aqg {

struct SampleVector {
    std::vector<double> values;
    std::string label;
};

struct TestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
    bool significant = false;
    double alpha = 0.05;
};

// CDF of Student's t distribution via the regularized incomplete beta
// function; exact 0.5 at t = 0.
double t_cdf(double t, double df);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided two-sample t-test. Pooled variance by default (df = na+nb-2);
// welch switches to the Welch-Satterthwaite form for sensitivity checks.
// Identical constant samples give t = 0, p = 1; unequal-mean samples with
// zero variance are a degenerate-sample error.
TestResult t_test_two_sample(const SampleVector& a, const SampleVector& b, double alpha = 0.05,
                             bool welch = false);

// Star rule for result tables: a model earns a star when its mean exceeds
// the weakest baseline's mean on that sample AND the test rejects at alpha.
std::map<std::string, bool> significance_stars(
    const std::map<std::string, SampleVector>& results,
    const std::map<std::string, SampleVector>& baselines, double alpha = 0.05);

// The baseline with the lowest mean, i.e. the comparison target of the star
// rule. Exposed separately so reports can name it.
std::string weakest_baseline(const std::map<std::string, SampleVector>& baselines);

double sample_mean(const std::vector<double>& values);
double sample_variance(const std::vector<double>& values);  // unbiased, n-1

} // namespace aqg
