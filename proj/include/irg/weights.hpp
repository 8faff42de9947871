#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "irg/rng.hpp"

namespace irg {

// A connectivity-weight law (also reused for edge and vertex marks).
class WeightSpec {
public:
    enum class Family { constant, finite_discrete, gamma };

    static WeightSpec constant(double c);
    static WeightSpec finite_discrete(std::vector<double> values, std::vector<double> probs);
    static WeightSpec gamma(double shape, double scale);
    static WeightSpec exponential(double rate = 1.0) { return gamma(1.0, 1.0 / rate); }

    Family family() const { return family_; }
    bool is_discrete() const { return family_ != Family::gamma; }

    // Atoms of a discrete law, sorted ascending. Empty for Gamma.
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }
    double shape() const { return shape_; }
    double scale() const { return scale_; }

    double mean() const { return raw_moment(1.0); }
    double raw_moment(double p) const;
    // Gamma_p of the law: E[W^p] / E[W].
    double gamma_p(double p) const { return raw_moment(p) / mean(); }

    double cdf(double x) const;
    // Left-continuous inverse CDF on (0, 1).
    double quantile(double u) const;
    // Integral of the quantile function over [u0, u1].
    double partial_expectation(double u0, double u1) const;
    // Density (Gamma) or point mass (discrete) at x.
    double density(double x) const;

    double sample(Rng& rng) const { return quantile(rng.uniform()); }

    // The size-biased law dν̂ = (w / E[W]) dν.
    WeightSpec size_biased() const;

    std::string describe() const;

    friend bool operator==(const WeightSpec&, const WeightSpec&) = default;

private:
    Family family_ = Family::constant;
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> cum_;
    double shape_ = 0.0;
    double scale_ = 0.0;
};

class UnsupportedCombination : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double edge_probability(double wu, double wv, std::size_t n, double theta);

struct EmpiricalWeights {
    std::size_t n = 0;
    std::vector<double> W;
    double theta = 0.0;

    double lambda_n() const;
    void validate() const;
};

// W_v drawn i.i.d. from spec via per-vertex keyed uniforms; theta = E[W].
EmpiricalWeights sample_empirical_weights(const WeightSpec& spec, std::size_t n, const Seed& seed);

struct MomentSummary {
    std::size_t n = 0;
    double theta = 0.0;
    std::array<double, 4> gamma{};  // Γ_{p,n}, p = 0..3
    std::array<double, 3> kappa{};  // κ_{p,n}, p = 1, 2 (index 0 unused)
    double lambda_n = 0.0;
    double alpha_n = 0.0;
};

MomentSummary moments(const EmpiricalWeights& weights);
// Also fills alpha_n = max(W1(ν_n, ν), W1(ν̂_n, ν̂)).
MomentSummary moments(const EmpiricalWeights& weights, const WeightSpec& limit);

// Finite measure on the line with sorted, merged atoms.
struct DiscreteMeasure {
    std::vector<double> values;
    std::vector<double> probs;

    static DiscreteMeasure from_atoms(std::vector<double> values, std::vector<double> probs);
    double cdf_at_or_below(double x) const;
};

DiscreteMeasure empirical_measure(const EmpiricalWeights& weights);
DiscreteMeasure size_biased_measure(const EmpiricalWeights& weights);
DiscreteMeasure to_measure(const WeightSpec& spec);

// 1-Wasserstein distance through the quantile coupling.
double wasserstein_1d(const DiscreteMeasure& a, const DiscreteMeasure& b);
double wasserstein_1d(const DiscreteMeasure& a, const WeightSpec& b);
double wasserstein_1d(const WeightSpec& a, const WeightSpec& b);

}  // namespace irg
