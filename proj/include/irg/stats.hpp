#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace irg {

struct KSReport {
    double statistic = 0.0;  // sup_t |F̂(t) − Φ(t)|
    std::size_t sample_size = 0;
};

// One-sample Kolmogorov distance of the samples to the standard normal.
KSReport ks_to_normal(const std::vector<double>& samples);
// Same distance after standardizing by the sample mean and standard deviation.
KSReport ks_standardized(const std::vector<double>& samples);
// Approximate standard deviation of the one-sample KS statistic under the null.
double ks_null_sd(std::size_t sample_size);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int df = 0;
};

// Two-sample KS test with the asymptotic Kolmogorov p-value.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

// Chi-square goodness of fit. Adjacent cells are pooled until every expected
// count is at least min_expected.
TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                          double min_expected = 5.0);
// Chi-square test of independence on a contingency table.
TestResult chi_square_independence(const std::vector<std::vector<double>>& table);

struct BinomialCI {
    double rate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double sigma = 0.0;  // √(p̂(1 − p̂)/trials)
};
// Wilson score interval with z standard deviations.
BinomialCI binomial_ci(std::uint64_t successes, std::uint64_t trials, double z = 3.0);

struct VarianceEstimate {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double jackknife_se = 0.0;
};
VarianceEstimate estimate_variance(const std::vector<double>& samples);

}  // namespace irg
