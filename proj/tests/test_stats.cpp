#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "irg/distributions.hpp"
#include "irg/rng.hpp"
#include "irg/stats.hpp"

using namespace irg;

namespace {

std::vector<double> normal_draws(std::uint64_t seed, std::size_t n, double mu = 0.0, double sd = 1.0) {
    Rng rng(seed);
    std::normal_distribution<double> d(mu, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = d(rng);
    return x;
}

// sup |F̂ − F| over the jump points of the empirical CDF
double ks_against(std::vector<double> x, const boost::math::normal& law) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = boost::math::cdf(law, x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

}  // namespace

TEST_CASE("normal cdf reference values") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-13));
    CHECK(normal_cdf(-3.0) == doctest::Approx(0.0013498980316300946).epsilon(1e-12));
    CHECK(normal_cdf(0.5) - normal_cdf(-0.5) == doctest::Approx(0.38292492254802624).epsilon(1e-13));
}

TEST_CASE("ks to normal") {
    CHECK(ks_to_normal(std::vector<double>(10, 0.0)).statistic == 0.5);
    CHECK_THROWS(ks_to_normal({}));
    CHECK_THROWS(ks_to_normal({1.0}));

    const auto z = normal_draws(1, 100000);
    const auto r = ks_to_normal(z);
    CHECK(r.sample_size == 100000);
    CHECK(r.statistic < 1.95 / std::sqrt(1e5));

    auto shifted = z;
    for (auto& v : shifted) v += 1.0;
    CHECK(ks_to_normal(shifted).statistic == doctest::Approx(0.38292492254802624).epsilon(0.02));
}

TEST_CASE("standardized ks equals raw comparison with the fitted normal") {
    const auto x = normal_draws(2, 5000, 3.0, 2.5);
    double m = 0, s2 = 0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    for (double v : x) s2 += (v - m) * (v - m);
    const double sd = std::sqrt(s2 / static_cast<double>(x.size() - 1));
    CHECK(ks_standardized(x).statistic == doctest::Approx(ks_against(x, boost::math::normal(m, sd))).epsilon(1e-9));
    auto y = x;
    for (auto& v : y) v = 7.0 * v - 4.0;
    CHECK(ks_standardized(y).statistic == doctest::Approx(ks_standardized(x).statistic).epsilon(1e-9));
    CHECK_THROWS(ks_standardized(std::vector<double>(5, 1.0)));
}

TEST_CASE("ks null standard deviation") {
    // sd of the Kolmogorov limit law: √(π²/12 − π ln²2/2)
    const double sd_k = std::sqrt(M_PI * M_PI / 12.0 - M_PI * std::log(2.0) * std::log(2.0) / 2.0);
    CHECK(ks_null_sd(2000) == doctest::Approx(sd_k / std::sqrt(2000.0)).epsilon(1e-12));
    // compare against simulated KS statistics
    std::vector<double> stats;
    for (std::uint64_t s = 0; s < 400; ++s) stats.push_back(ks_to_normal(normal_draws(100 + s, 2000)).statistic);
    double m = 0, q = 0;
    for (double v : stats) m += v;
    m /= 400;
    for (double v : stats) q += (v - m) * (v - m);
    const double sim = std::sqrt(q / 399);
    // sd of a sample sd from 400 draws is about 4%; allow a bit more for finite n
    CHECK(sim == doctest::Approx(ks_null_sd(2000)).epsilon(0.15));
}

TEST_CASE("kolmogorov survival and two-sample ks") {
    CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-9));
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.0) == 1.0);
    std::vector<double> a, b;
    for (int i = 0; i < 50; ++i) {
        a.push_back(i);
        b.push_back(100 + i);
    }
    const auto same = ks_two_sample(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);
    const auto apart = ks_two_sample(a, b);
    CHECK(apart.statistic == 1.0);
    CHECK(apart.p_value < 1e-10);
    const auto x = normal_draws(3, 3000), y = normal_draws(4, 2000);
    CHECK(ks_two_sample(x, y).p_value > 0.001);
}

TEST_CASE("chi-square goodness of fit") {
    const auto exact = chi_square_gof({25, 25, 25, 25}, {0.25, 0.25, 0.25, 0.25});
    CHECK(exact.statistic == 0.0);
    CHECK(exact.p_value == doctest::Approx(1.0));
    CHECK(exact.df == 3);
    const auto r = chi_square_gof({10, 20, 30, 40}, {0.25, 0.25, 0.25, 0.25});
    CHECK(r.statistic == doctest::Approx(20.0));
    // df = 3 survival: erfc(√(x/2)) + √(2x/π)e^{−x/2}
    CHECK(r.p_value == doctest::Approx(std::erfc(std::sqrt(10.0)) + std::sqrt(40.0 / M_PI) * std::exp(-10.0)).epsilon(1e-9));
    const auto pooled = chi_square_gof({50, 45, 3, 2}, {0.5, 0.45, 0.03, 0.02});
    CHECK(pooled.df == 2);
    CHECK(pooled.statistic == doctest::Approx(0.0));
    CHECK_THROWS(chi_square_gof({1, 2}, {0.5, 0.4, 0.1}));
}

TEST_CASE("chi-square independence") {
    const auto flat = chi_square_independence({{10, 20}, {20, 40}});
    CHECK(flat.statistic == doctest::Approx(0.0));
    CHECK(flat.df == 1);
    const auto diag = chi_square_independence({{10, 0}, {0, 10}});
    CHECK(diag.statistic == doctest::Approx(20.0));
    CHECK(diag.p_value == doctest::Approx(std::erfc(std::sqrt(10.0))).epsilon(1e-9));
}

TEST_CASE("wilson interval") {
    const auto mid = binomial_ci(5, 10);
    CHECK(mid.rate == 0.5);
    CHECK(mid.sigma == doctest::Approx(std::sqrt(0.025)));
    CHECK(mid.lower == doctest::Approx(0.5 - 3 * std::sqrt(0.0475) / 1.9).epsilon(1e-12));
    CHECK(mid.upper == doctest::Approx(0.5 + 3 * std::sqrt(0.0475) / 1.9).epsilon(1e-12));
    const auto none = binomial_ci(0, 10);
    CHECK(none.lower == 0.0);
    CHECK(none.upper > 0.0);
    const auto all = binomial_ci(10, 10);
    CHECK(all.upper == 1.0);
    CHECK(all.lower < 1.0);
    CHECK_THROWS(binomial_ci(1, 0));
    CHECK_THROWS(binomial_ci(3, 2));
}

TEST_CASE("variance estimates") {
    const auto two = estimate_variance({0.0, 2.0});
    CHECK(two.variance == 2.0);
    CHECK(two.mean == 1.0);
    CHECK(std::isnan(two.jackknife_se));
    CHECK(estimate_variance(std::vector<double>(20, 3.5)).variance == 0.0);
    CHECK_THROWS(estimate_variance({1.0}));

    const auto z = normal_draws(7, 100000);
    CHECK(std::abs(estimate_variance(z).variance - 1.0) <= 3.0 * std::sqrt(2.0 / 1e5));

    // jackknife against explicit leave-one-out recomputation
    const std::vector<double> x{1.0, 4.0, 2.5, 7.0, 3.0, 0.5};
    const std::size_t n = x.size();
    std::vector<double> loo;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> y;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) y.push_back(x[j]);
        double m = 0, q = 0;
        for (double v : y) m += v;
        m /= static_cast<double>(y.size());
        for (double v : y) q += (v - m) * (v - m);
        loo.push_back(q / static_cast<double>(y.size() - 1));
    }
    double lm = 0, lq = 0;
    for (double v : loo) lm += v;
    lm /= static_cast<double>(n);
    for (double v : loo) lq += (v - lm) * (v - lm);
    const double se = std::sqrt((static_cast<double>(n) - 1) / static_cast<double>(n) * lq);
    CHECK(estimate_variance(x).jackknife_se == doctest::Approx(se).epsilon(1e-12));
}
