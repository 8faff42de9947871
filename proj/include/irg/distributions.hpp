#pragma once

#include <utility>

#include "irg/rng.hpp"

namespace irg {

// Poisson inverse CDF: smallest k with P(Poi(mean) <= k) >= u.
// Means above 700 are rejected because e^{-mean} underflows.
int poisson_quantile(double mean, double u);

// (P(Poi <= k-1), P(Poi <= k)), accumulated exactly as poisson_quantile does,
// so that poisson_quantile(mean, u) == k for u inside the returned interval.
std::pair<double, double> poisson_cdf_interval(double mean, int k);

double poisson_pmf(double mean, int k);

int sample_poisson(Rng& rng, double mean);
double sample_exponential(Rng& rng, double rate = 1.0);

// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace irg
