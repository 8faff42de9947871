#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irg/exploration.hpp"
#include "irg/graph.hpp"
#include "irg/limit_trees.hpp"
#include "irg/tree.hpp"
#include "irg/weights.hpp"

namespace irg {

enum class BreakReason : std::uint8_t {
    none = 0,
    x_neq_z,
    active_collision,
    completed_collision,
    size_overflow,
    type_repeat,
    wasserstein_redraw,
    weight_mismatch,
};
inline constexpr int break_reason_count = 8;

const char* to_string(BreakReason r);

struct CouplingConfig {
    double k_n = 1.0;  // size threshold for ‖S_ℓ(v)‖
    int depth = 1;
    bool include_weights = true;

    // k_n = ⌈n^{1/3}⌉.
    static CouplingConfig standard(std::size_t n, int depth);
    void validate() const;
};

struct CouplingOutcome {
    int root = 0;
    int depth = 0;
    Neighbourhood neighbourhood;
    RootedWeightedTree tree;
    bool ok = true;
    std::optional<int> break_level;
    BreakReason break_reason = BreakReason::none;  // first break in pipeline order
    std::uint32_t stage_flags = 0;                 // bit r set when reason r occurred

    void record_break(BreakReason reason, int level);
    bool has(BreakReason r) const { return (stage_flags >> static_cast<unsigned>(r)) & 1u; }
};

struct BernoulliPoisson {
    int x = 0;
    int z = 0;
};

// X ~ Bernoulli(min(p′,1)) and Z ~ Poisson(p′) from one uniform u: X = 1{u ≤ p_e}
// and Z = F⁻¹_{Poi(p′)}(1 − u). X = 0 forces Z = 0 when p′ < 1 and
// P(X ≠ Z) = p′(1 − e^{−p′}) ≤ p′².
BernoulliPoisson couple_bernoulli_poisson(double p_prime, double u);
BernoulliPoisson couple_bernoulli_poisson(double p_prime, const Seed& seed, std::uint64_t site);

// Shared per-weight-vector state for the coupling stages.
class CouplingContext {
public:
    CouplingContext(const EmpiricalWeights& weights, const WeightSpec& limit);

    const EmpiricalWeights& weights() const { return weights_; }
    const TypeSampler& types() const { return types_; }
    const WeightSpec& limit() const { return limit_; }
    const WeightSpec& limit_biased() const { return limit_biased_; }
    // CDF interval of the atom of ν̂_n at w.
    std::pair<double, double> biased_atom(double w) const;

private:
    EmpiricalWeights weights_;
    TypeSampler types_;
    WeightSpec limit_;
    WeightSpec limit_biased_;
    std::vector<double> atoms_;
    std::vector<double> cum_;
};

// Explores B_ℓ(v) and builds the intermediate tree from coupled variables.
CouplingOutcome couple_neighbourhood_to_intermediate(const WeightedGraph& graph, int v, const CouplingConfig& cfg,
                                                     const Seed& seed);
CouplingOutcome couple_neighbourhood_to_intermediate(const WeightedGraph& graph, const TypeSampler& types, int v,
                                                     const CouplingConfig& cfg, const Seed& seed);

// Joint level-by-level pass; a node whose type already occurred in another
// tree gets a fresh subtree and its outcome is flagged type_repeat.
std::vector<CouplingOutcome> repair_independence(std::vector<CouplingOutcome> outcomes,
                                                 const EmpiricalWeights& weights, const Seed& seed);
std::vector<CouplingOutcome> repair_independence(std::vector<CouplingOutcome> outcomes,
                                                 const EmpiricalWeights& weights, const TypeSampler& types,
                                                 const Seed& seed);

struct LimitCoupling {
    RootedWeightedTree tree;
    bool ok = true;
    std::optional<int> break_level;
    BreakReason reason = BreakReason::none;
};

// Node by node: types through the quantile coupling of ν̂_n and ν̂, child
// counts through the quantile coupling of the two Poisson laws.
LimitCoupling couple_intermediate_to_limit(const RootedWeightedTree& tree, const EmpiricalWeights& weights,
                                           const WeightSpec& spec, int depth, const Seed& seed);
LimitCoupling couple_intermediate_to_limit(const RootedWeightedTree& tree, const CouplingContext& ctx, int depth,
                                           const Seed& seed);

// Maximal coupling of one mark: returns y ~ `to` given x ~ `from`, keeping
// y = x with the largest possible probability.
double tv_couple_mark(const std::optional<WeightSpec>& from, const std::optional<WeightSpec>& to, double x, Rng& rng);

std::vector<CouplingOutcome> couple_full(const WeightedGraph& graph, const std::vector<int>& roots,
                                         const CouplingConfig& cfg, const WeightSpec& spec,
                                         const MarkLaws& limit_marks, const Seed& seed);
std::vector<CouplingOutcome> couple_full(const WeightedGraph& graph, const CouplingContext& ctx,
                                         const std::vector<int>& roots, const CouplingConfig& cfg,
                                         const MarkLaws& limit_marks, const Seed& seed);

}  // namespace irg
