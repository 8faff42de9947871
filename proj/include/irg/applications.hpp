#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "irg/exploration.hpp"
#include "irg/graph.hpp"
#include "irg/tree.hpp"

namespace irg {

// ---- dependent edge-weight sum ----

// N(G) = Σ_{e={u,v}} (w_u + w_v) X_e.
double dependent_edge_sum(const WeightedGraph& g);
// Σ_v |D_1(v)| w_v, the same quantity summed by vertex.
double dependent_edge_sum_by_degree(const WeightedGraph& g);
// Δ_site N = N(G) − N(G^site) in closed form.
double delta_N(const WeightedGraph& g, const Site& site);

// ---- maximum weight matching ----

struct WeightedEdgeList {
    int n = 0;
    std::vector<std::tuple<int, int, double>> edges;

    static WeightedEdgeList of(const WeightedGraph& g);
    static WeightedEdgeList of(const RootedWeightedTree& t);
    // Same vertex set with all edges at the given vertices removed.
    WeightedEdgeList without(const std::vector<int>& vertices) const;
};

struct Matching {
    std::vector<std::pair<int, int>> edges;
    double value = 0.0;
};

inline constexpr int exact_matching_limit = 24;

class SolverLimitExceeded : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exact optimum by memoized search over vertex subsets (at most 24 vertices).
Matching max_weight_matching(const WeightedEdgeList& g);
Matching max_weight_matching(const WeightedGraph& g);
// Linear-time dynamic programme on a tree; edges refer to node indices.
Matching max_weight_matching(const RootedWeightedTree& t);

// h(G, v) = M(G) − M(G − v).
double h_value(const WeightedEdgeList& g, int v);
double h_value(const WeightedGraph& g, int v);

// Root value of the depth-k recursion: zero at depth k and at leaves,
// otherwise max{0, max_children (w − h_k(child))}.
double h_k(const RootedWeightedTree& t, int k);

struct SandwichResult {
    double gL = 0.0;
    double gU = 0.0;
    int kL = 0;
    int kU = 1;
};

// kU = largest odd ≤ k, kL = kU − 1; gL = h_{kL}(B_{kL}), gU = h_{kU}(B_{kU}).
SandwichResult matching_sandwich(const RootedWeightedTree& ball, int k);
SandwichResult matching_sandwich(const Neighbourhood& nb, const WeightedGraph& g, int k);

// ---- perturbation envelopes ----

enum class Application { edge_sum, matching };
Application parse_application(const std::string& s);
const char* to_string(Application a);

struct EnvelopeCheck {
    double delta = 0.0;     // Δ_site f
    double envelope = 0.0;  // the bound on |Δ_site f|
    bool holds() const { return std::abs(delta) <= envelope; }
};

// edge-sum: H_E = w_u + w_v, H_V = |D_1(v)|(w_v + w′_v); matching: H_E = max{w_e, w′_e}
// (both edge envelopes multiplied by 1{max(X_e, X′_e) = 1}).
EnvelopeCheck envelope_bounds(Application app, const Site& site, const WeightedGraph& g);

}  // namespace irg
