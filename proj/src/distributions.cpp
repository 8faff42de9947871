#include "irg/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace irg {

namespace {
void check_mean(double mean) {
    if (!(mean >= 0.0) || mean > 700.0) throw std::domain_error("Poisson mean out of supported range [0, 700]");
}
int tail_guard(double mean) { return static_cast<int>(mean + 40.0 * std::sqrt(mean) + 60.0); }
}  // namespace

int poisson_quantile(double mean, double u) {
    check_mean(mean);
    if (mean == 0.0) return 0;
    double p = std::exp(-mean);
    double cdf = p;
    int k = 0;
    const int guard = tail_guard(mean);
    while (u > cdf && k < guard) {
        ++k;
        p *= mean / k;
        cdf += p;
    }
    return k;
}

std::pair<double, double> poisson_cdf_interval(double mean, int k) {
    check_mean(mean);
    if (k < 0) return {0.0, 0.0};
    if (mean == 0.0) return {k == 0 ? 0.0 : 1.0, 1.0};
    double p = std::exp(-mean);
    double lo = 0.0;
    double cdf = p;
    for (int i = 1; i <= k; ++i) {
        lo = cdf;
        p *= mean / i;
        cdf += p;
    }
    return {lo, cdf};
}

double poisson_pmf(double mean, int k) {
    if (k < 0) return 0.0;
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

int sample_poisson(Rng& rng, double mean) { return poisson_quantile(mean, rng.uniform()); }

double sample_exponential(Rng& rng, double rate) { return -std::log(rng.uniform()) / rate; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace irg
