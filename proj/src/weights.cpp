#include "irg/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace irg {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be a positive finite real");
}

double clamp01(double u) { return std::min(1.0, std::max(0.0, u)); }

}  // namespace

WeightSpec WeightSpec::constant(double c) {
    require_positive(c, "constant weight");
    WeightSpec s;
    s.family_ = Family::constant;
    s.values_ = {c};
    s.probs_ = {1.0};
    s.cum_ = {1.0};
    return s;
}

WeightSpec WeightSpec::finite_discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw std::invalid_argument("finite_discrete: values and probs must be nonempty and of equal length");
    for (double v : values) require_positive(v, "finite_discrete value");
    for (double p : probs) require_positive(p, "finite_discrete probability");
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("finite_discrete: probabilities must sum to 1");
    DiscreteMeasure m = DiscreteMeasure::from_atoms(std::move(values), std::move(probs));
    WeightSpec s;
    s.family_ = Family::finite_discrete;
    s.values_ = std::move(m.values);
    s.probs_ = std::move(m.probs);
    double acc = 0.0;
    for (double p : s.probs_) s.cum_.push_back(acc += p / total);
    s.cum_.back() = 1.0;
    return s;
}

WeightSpec WeightSpec::gamma(double shape, double scale) {
    require_positive(shape, "gamma shape");
    require_positive(scale, "gamma scale");
    WeightSpec s;
    s.family_ = Family::gamma;
    s.shape_ = shape;
    s.scale_ = scale;
    return s;
}

double WeightSpec::raw_moment(double p) const {
    if (family_ == Family::gamma)
        return std::exp(p * std::log(scale_) + std::lgamma(shape_ + p) - std::lgamma(shape_));
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * std::pow(values_[i], p);
    return m;
}

double WeightSpec::cdf(double x) const {
    if (family_ == Family::gamma) return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, x / scale_);
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    if (it == values_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

double WeightSpec::quantile(double u) const {
    if (family_ == Family::gamma) {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return std::numeric_limits<double>::infinity();
        return scale_ * boost::math::gamma_p_inv(shape_, u);
    }
    auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) --it;
    return values_[static_cast<std::size_t>(it - cum_.begin())];
}

double WeightSpec::partial_expectation(double u0, double u1) const {
    u0 = clamp01(u0);
    u1 = clamp01(u1);
    if (u1 <= u0) return 0.0;
    if (family_ == Family::gamma) {
        auto upper = [&](double u) {
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 1.0;
            return boost::math::gamma_p(shape_ + 1.0, boost::math::gamma_p_inv(shape_, u));
        };
        return shape_ * scale_ * (upper(u1) - upper(u0));
    }
    double acc = 0.0;
    double lo = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double hi = cum_[i];
        const double overlap = std::min(hi, u1) - std::max(lo, u0);
        if (overlap > 0.0) acc += overlap * values_[i];
        lo = hi;
    }
    return acc;
}

double WeightSpec::density(double x) const {
    if (family_ == Family::gamma)
        return x <= 0.0 ? 0.0 : boost::math::gamma_p_derivative(shape_, x / scale_) / scale_;
    auto it = std::lower_bound(values_.begin(), values_.end(), x);
    if (it == values_.end() || *it != x) return 0.0;
    return probs_[static_cast<std::size_t>(it - values_.begin())];
}

WeightSpec WeightSpec::size_biased() const {
    switch (family_) {
        case Family::constant:
            return *this;
        case Family::gamma:
            return gamma(shape_ + 1.0, scale_);
        case Family::finite_discrete: {
            const double m = mean();
            std::vector<double> probs(values_.size());
            for (std::size_t i = 0; i < values_.size(); ++i) probs[i] = probs_[i] * values_[i] / m;
            const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
            for (double& p : probs) p /= total;
            return finite_discrete(values_, probs);
        }
    }
    return *this;
}

std::string WeightSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case Family::constant:
            os << "Constant(" << values_[0] << ")";
            break;
        case Family::gamma:
            os << "Gamma(" << shape_ << "," << scale_ << ")";
            break;
        case Family::finite_discrete:
            os << "FiniteDiscrete(";
            for (std::size_t i = 0; i < values_.size(); ++i) os << (i ? ";" : "") << values_[i] << ":" << probs_[i];
            os << ")";
            break;
    }
    return os.str();
}

double edge_probability(double wu, double wv, std::size_t n, double theta) {
    if (!(wu > 0.0) || !(wv > 0.0) || n == 0 || !(theta > 0.0))
        throw std::domain_error("edge_probability: arguments must be positive");
    return std::min(wu * wv / (static_cast<double>(n) * theta), 1.0);
}

double EmpiricalWeights::lambda_n() const { return std::accumulate(W.begin(), W.end(), 0.0); }

void EmpiricalWeights::validate() const {
    if (n == 0 || W.size() != n) throw std::invalid_argument("EmpiricalWeights: size mismatch");
    if (!(theta > 0.0)) throw std::invalid_argument("EmpiricalWeights: theta must be positive");
    for (double w : W)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("EmpiricalWeights: weights must be positive");
}

EmpiricalWeights sample_empirical_weights(const WeightSpec& spec, std::size_t n, const Seed& seed) {
    if (n == 0) throw std::invalid_argument("sample_empirical_weights: n must be at least 1");
    EmpiricalWeights w;
    w.n = n;
    w.theta = spec.mean();
    w.W.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        const double u = to_unit(site_key(seed, 0, SiteKind::weights, {v}));
        // Gamma quantiles can round to zero for tiny u; keep weights positive.
        w.W[v] = std::max(spec.quantile(u), std::numeric_limits<double>::min());
    }
    return w;
}

MomentSummary moments(const EmpiricalWeights& weights) {
    weights.validate();
    MomentSummary m;
    m.n = weights.n;
    m.theta = weights.theta;
    const double scale = static_cast<double>(weights.n) * weights.theta;
    const double root = std::sqrt(scale);
    for (double w : weights.W) {
        double pw = 1.0;
        for (int p = 0; p <= 3; ++p) {
            m.gamma[p] += pw;
            if (w > root && (p == 1 || p == 2)) m.kappa[p] += pw;
            pw *= w;
        }
        m.lambda_n += w;
    }
    for (double& g : m.gamma) g /= scale;
    for (double& k : m.kappa) k /= scale;
    return m;
}

MomentSummary moments(const EmpiricalWeights& weights, const WeightSpec& limit) {
    MomentSummary m = moments(weights);
    const double plain = wasserstein_1d(empirical_measure(weights), limit);
    const double biased = wasserstein_1d(size_biased_measure(weights), limit.size_biased());
    m.alpha_n = std::max(plain, biased);
    return m;
}

DiscreteMeasure DiscreteMeasure::from_atoms(std::vector<double> values, std::vector<double> probs) {
    if (values.size() != probs.size()) throw std::invalid_argument("DiscreteMeasure: size mismatch");
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    DiscreteMeasure m;
    for (std::size_t i : idx) {
        if (!m.values.empty() && m.values.back() == values[i]) {
            m.probs.back() += probs[i];
        } else {
            m.values.push_back(values[i]);
            m.probs.push_back(probs[i]);
        }
    }
    return m;
}

double DiscreteMeasure::cdf_at_or_below(double x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size() && values[i] <= x; ++i) acc += probs[i];
    return acc;
}

DiscreteMeasure empirical_measure(const EmpiricalWeights& weights) {
    return DiscreteMeasure::from_atoms(weights.W, std::vector<double>(weights.n, 1.0 / static_cast<double>(weights.n)));
}

DiscreteMeasure size_biased_measure(const EmpiricalWeights& weights) {
    const double total = weights.lambda_n();
    std::vector<double> probs(weights.n);
    for (std::size_t v = 0; v < weights.n; ++v) probs[v] = weights.W[v] / total;
    return DiscreteMeasure::from_atoms(weights.W, std::move(probs));
}

DiscreteMeasure to_measure(const WeightSpec& spec) {
    if (!spec.is_discrete()) throw UnsupportedCombination("to_measure: law is not discrete");
    return DiscreteMeasure{spec.values(), spec.probs()};
}

double wasserstein_1d(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    // Walk the two quantile step functions together.
    if (a.values.empty() || b.values.empty()) throw std::invalid_argument("wasserstein_1d: empty measure");
    std::size_t i = 0, j = 0;
    double ea = a.probs[0], eb = b.probs[0];
    double u = 0.0, acc = 0.0;
    while (i < a.values.size() && j < b.values.size()) {
        const double next = std::min(ea, eb);
        acc += (next - u) * std::abs(a.values[i] - b.values[j]);
        u = next;
        if (ea <= next && ++i < a.values.size()) ea += a.probs[i];
        if (eb <= next && ++j < b.values.size()) eb += b.probs[j];
    }
    return acc;
}

double wasserstein_1d(const DiscreteMeasure& a, const WeightSpec& b) {
    if (b.is_discrete()) return wasserstein_1d(a, to_measure(b));
    double acc = 0.0;
    double c0 = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double c1 = (i + 1 == a.values.size()) ? 1.0 : std::min(1.0, c0 + a.probs[i]);
        const double x = a.values[i];
        const double us = std::clamp(b.cdf(x), c0, c1);
        const double below = x * (us - c0) - b.partial_expectation(c0, us);
        const double above = b.partial_expectation(us, c1) - x * (c1 - us);
        acc += std::max(0.0, below) + std::max(0.0, above);
        c0 = c1;
    }
    return acc;
}

double wasserstein_1d(const WeightSpec& a, const WeightSpec& b) {
    if (a.is_discrete()) return wasserstein_1d(to_measure(a), b);
    if (b.is_discrete()) return wasserstein_1d(to_measure(b), a);
    if (a == b) return 0.0;
    throw UnsupportedCombination("wasserstein_1d: two distinct continuous laws are not supported");
}

}  // namespace irg
