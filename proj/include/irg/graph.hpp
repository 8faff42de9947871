#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "irg/rng.hpp"
#include "irg/weights.hpp"

namespace irg {

// Laws of the decorative edge and vertex weights. An empty law means the
// corresponding weights are identically zero.
struct MarkLaws {
    std::optional<WeightSpec> edge;
    std::optional<WeightSpec> vertex;

    friend bool operator==(const MarkLaws&, const MarkLaws&) = default;
};

// A vertex (v < 0) or an unordered vertex pair.
struct Site {
    int u = 0;
    int v = -1;

    static Site vertex(int x) { return {x, -1}; }
    static Site edge(int a, int b) { return a < b ? Site{a, b} : Site{b, a}; }
    bool is_vertex() const { return v < 0; }

    friend bool operator==(const Site&, const Site&) = default;
};

struct PerturbationSet {
    std::vector<Site> items;
    bool all_sites = false;  // F = V ∪ V^(2)

    static PerturbationSet everything() {
        PerturbationSet f;
        f.all_sites = true;
        return f;
    }
    // Throws on out-of-range vertices, loops, or repeated sites.
    void validate(std::size_t n) const;
};

inline std::uint64_t pair_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Sparse realized graph plus keyed access to every site value. Cheap to copy;
// the realized adjacency and the lazily generated replacement graph are shared.
class WeightedGraph {
public:
    std::size_t n() const;
    const EmpiricalWeights& weights() const;
    const MarkLaws& marks() const;
    const Seed& seed() const;
    std::uint64_t stream() const;

    std::span<const int> neighbours(int v) const;
    std::size_t degree(int v) const { return neighbours(v).size(); }
    bool has_edge(int u, int v) const;
    std::size_t edge_count() const;
    std::vector<std::pair<int, int>> edge_list() const;

    // Site values of this graph, i.e. replacement values on perturbed sites.
    double vertex_weight(int v) const;
    double edge_weight(int u, int v) const;

    // Raw primary and replacement site values, unaffected by perturbation.
    bool primary_edge(int u, int v) const;
    bool replacement_edge(int u, int v) const;
    double primary_vertex_weight(int v) const;
    double replacement_vertex_weight(int v) const;
    double primary_edge_weight(int u, int v) const;
    double replacement_edge_weight(int u, int v) const;

    bool is_perturbed(const Site& s) const;

    struct Shared;
    struct Csr;
    struct Overlay;

private:
    friend WeightedGraph sample_graph(const EmpiricalWeights&, const Seed&, std::uint64_t, MarkLaws);
    friend WeightedGraph graph_from_edges(const EmpiricalWeights&, const std::vector<std::pair<int, int>>&,
                                          const Seed&, std::uint64_t, MarkLaws);
    friend WeightedGraph perturb(const WeightedGraph&, const PerturbationSet&);
    friend void set_explicit_marks(WeightedGraph&, std::vector<double>, std::unordered_map<std::uint64_t, double>);

    void check_vertex(int v) const;

    std::shared_ptr<Shared> shared_;
    std::shared_ptr<const Csr> adj_;
    std::shared_ptr<const Overlay> overlay_;
};

// Realizes X_uv ~ Bernoulli(min(W_uW_v/(nϑ), 1)) independently over pairs.
WeightedGraph sample_graph(const EmpiricalWeights& weights, const Seed& seed, std::uint64_t stream,
                           MarkLaws marks = {});

// Graph with a prescribed primary edge set; replacement values remain random.
WeightedGraph graph_from_edges(const EmpiricalWeights& weights, const std::vector<std::pair<int, int>>& edges,
                               const Seed& seed = {}, std::uint64_t stream = 0, MarkLaws marks = {});

// Overrides the primary vertex and edge weights (missing entries are zero).
void set_explicit_marks(WeightedGraph& g, std::vector<double> vertex_weights,
                        std::unordered_map<std::uint64_t, double> edge_weights);

// G^F: edge indicators and weights on the sites of F replaced by their primed copies.
WeightedGraph perturb(const WeightedGraph& graph, const PerturbationSet& f);

}  // namespace irg
