#include "irg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "irg/distributions.hpp"

namespace irg {

KSReport ks_to_normal(const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("ks_to_normal: need at least 2 samples");
    std::vector<double> x = samples;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < x.size()) {
        // handle ties as one jump of the empirical CDF
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        const double f = normal_cdf(x[i]);
        d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(f - static_cast<double>(i) / n)});
        i = j;
    }
    return {d, x.size()};
}

KSReport ks_standardized(const std::vector<double>& samples) {
    const auto v = estimate_variance(samples);
    if (!(v.variance > 0.0)) throw std::invalid_argument("ks_standardized: zero sample variance");
    const double sd = std::sqrt(v.variance);
    std::vector<double> z(samples.size());
    std::transform(samples.begin(), samples.end(), z.begin(), [&](double x) { return (x - v.mean) / sd; });
    return ks_to_normal(z);
}

double ks_null_sd(std::size_t sample_size) {
    // sd of sup|B(t)| for a Brownian bridge: √(π²/12 − π ln²2/2) ≈ 0.2606
    const double pi = std::acos(-1.0);
    const double sd = std::sqrt(pi * pi / 12.0 - pi * std::log(2.0) * std::log(2.0) / 2.0);
    return sd / std::sqrt(static_cast<double>(sample_size));
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    TestResult r;
    r.statistic = d;
    r.p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
    return r;
}

TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                          double min_expected) {
    if (observed.size() != probs.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
    const double psum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (total <= 0.0 || psum <= 0.0) throw std::invalid_argument("chi_square_gof: empty table");
    std::vector<double> obs, exp;
    double o = 0.0, e = 0.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        o += observed[k];
        e += total * probs[k] / psum;
        if (e >= min_expected) {
            obs.push_back(o);
            exp.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (exp.empty()) {
            obs.push_back(o);
            exp.push_back(e);
        } else {
            obs.back() += o;
            exp.back() += e;
        }
    }
    TestResult r;
    r.df = static_cast<int>(exp.size()) - 1;
    for (std::size_t k = 0; k < exp.size(); ++k) r.statistic += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
    if (r.df < 1) {
        r.p_value = 1.0;
        return r;
    }
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.df), r.statistic));
    return r;
}

TestResult chi_square_independence(const std::vector<std::vector<double>>& table) {
    if (table.empty() || table[0].empty()) throw std::invalid_argument("chi_square_independence: empty table");
    const std::size_t rows = table.size(), cols = table[0].size();
    std::vector<double> rs(rows, 0.0), cs(cols, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (table[i].size() != cols) throw std::invalid_argument("chi_square_independence: ragged table");
        for (std::size_t j = 0; j < cols; ++j) {
            rs[i] += table[i][j];
            cs[j] += table[i][j];
            total += table[i][j];
        }
    }
    TestResult r;
    std::size_t live_r = 0, live_c = 0;
    for (double x : rs) live_r += x > 0.0;
    for (double x : cs) live_c += x > 0.0;
    r.df = static_cast<int>((live_r > 0 ? live_r - 1 : 0) * (live_c > 0 ? live_c - 1 : 0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double e = rs[i] * cs[j] / total;
            if (e > 0.0) r.statistic += (table[i][j] - e) * (table[i][j] - e) / e;
        }
    r.p_value = r.df < 1 ? 1.0
                         : boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.df), r.statistic));
    return r;
}

BinomialCI binomial_ci(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("binomial_ci: zero trials");
    if (successes > trials) throw std::invalid_argument("binomial_ci: successes exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {p, lo, hi, std::sqrt(p * (1.0 - p) / n)};
}

VarianceEstimate estimate_variance(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("estimate_variance: need at least 2 samples");
    const double nd = static_cast<double>(n);
    VarianceEstimate v;
    v.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / nd;
    double ss = 0.0;
    for (double x : samples) ss += (x - v.mean) * (x - v.mean);
    v.variance = ss / (nd - 1.0);
    if (n < 3) {
        v.jackknife_se = std::numeric_limits<double>::quiet_NaN();
        return v;
    }
    // leave-one-out: SS_i = SS − n/(n−1)·d_i²
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = samples[i] - v.mean;
        loo[i] = (ss - nd / (nd - 1.0) * d * d) / (nd - 2.0);
    }
    const double m = std::accumulate(loo.begin(), loo.end(), 0.0) / nd;
    double acc = 0.0;
    for (double x : loo) acc += (x - m) * (x - m);
    v.jackknife_se = std::sqrt((nd - 1.0) / nd * acc);
    return v;
}

}  // namespace irg
