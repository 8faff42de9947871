#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "irg/graph.hpp"
#include "irg/rng.hpp"
#include "irg/tree.hpp"
#include "irg/weights.hpp"

namespace irg {

inline constexpr std::size_t default_node_cap = 1'000'000;

class NodeBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Draws a vertex index i with probability W_i / Λ_n.
class TypeSampler {
public:
    explicit TypeSampler(const EmpiricalWeights& weights);
    int draw(Rng& rng) const;
    double lambda_n() const { return cum_.empty() ? 0.0 : cum_.back(); }
    // Mean offspring count Λ_n W_i / (nϑ) of an individual of type i.
    double offspring_mean(double w) const { return w * lambda_n() / scale_; }

private:
    std::vector<double> cum_;
    double scale_ = 1.0;
};

// T_ℓ(W, ν) with i.i.d. edge and vertex weights from the mark laws.
RootedWeightedTree sample_limit_tree(double W, const WeightSpec& spec, const MarkLaws& marks, int depth,
                                     const Seed& seed, std::size_t node_cap = default_node_cap);

// T̃_ℓ(v): node source = empirical type index, node type = W_source.
RootedWeightedTree sample_intermediate_tree(const EmpiricalWeights& weights, int v, int depth, const Seed& seed,
                                            std::size_t node_cap = default_node_cap);
RootedWeightedTree sample_intermediate_tree(const EmpiricalWeights& weights, const TypeSampler& types, int v,
                                            int depth, const Seed& seed, std::size_t node_cap = default_node_cap);

// Fresh descendants below `node` down to depth `max_depth`, using the
// intermediate offspring law. Children are ordered by type index.
void grow_intermediate(RootedWeightedTree& t, int node, int max_depth, const EmpiricalWeights& weights,
                       const TypeSampler& types, Rng& rng, std::size_t node_cap = default_node_cap);

// Fresh limit-law descendants below `node`; `biased` is ν̂.
void grow_limit(RootedWeightedTree& t, int node, int max_depth, const WeightSpec& biased, const MarkLaws& marks,
                Rng& rng, std::size_t node_cap = default_node_cap);

// Attaches t2 below the root of t through an edge of weight w. The result has
// height at most `depth` when t has height <= depth and t2 height <= depth-1.
RootedWeightedTree graft(const RootedWeightedTree& t, const RootedWeightedTree& t2, double w, int depth);

struct Population {
    std::vector<double> particles;
    std::size_t size() const { return particles.size(); }
};

// One step of X ↦ max(0, max_{i≤N} (ξ_i − X_i)), N ~ MPoi(ν̂), ξ_i ~ Exp(1).
Population rde_apply(const Population& pop, const WeightSpec& spec, const Seed& seed);

// Seed used for the t-th application inside rde_fixed_point.
Seed rde_iteration_seed(const Seed& seed, int t);

double population_wasserstein(const Population& a, const Population& b);

struct RdeDiagnostics {
    enum class Status { converged, stalled, running };
    std::vector<double> gaps;    // W1(T^{2k}δ0, T^{2k+1}δ0), k = 0, 1, ... (chain 0)
    std::vector<double> gap_sd;  // sd of gaps[k] across independent chains
    double noise = 0.0;          // W1 between chains at the last even iterate
    Status status = Status::running;
};

struct RdeResult {
    Population even;
    Population odd;
    RdeDiagnostics diagnostics;
};

// Chain 0 runs on `seed` itself; further chains only feed the noise estimates.
RdeResult rde_fixed_point(const WeightSpec& spec, std::size_t pop_size, int iterations, const Seed& seed,
                          int chains = 8);
Seed rde_chain_seed(const Seed& seed, int chain);

// gaps[k] <= gaps[k-1] + 2·sd of the difference.
bool rde_gaps_non_increasing(const RdeDiagnostics& d);

const char* to_string(RdeDiagnostics::Status s);

}  // namespace irg
