#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irg/graph.hpp"
#include "irg/tree.hpp"

namespace irg {

struct NbEdge {
    int a = 0;          // endpoint explored first (the parent side for tree edges)
    int b = 0;
    int level = 0;      // level of a
    bool tree_edge = false;
};

// The explored ball B_ℓ(v). Vertices are listed in exploration order, which
// is the Ulam-Harris order with children taken by ascending vertex label.
struct Neighbourhood {
    int root = 0;
    int depth = 0;
    std::vector<int> order;                // v_0, v_1, ...
    std::vector<int> level;                // per exploration index
    std::vector<int> parent;               // exploration index of the parent, -1 for the root
    std::vector<std::vector<int>> levels;  // D_0, ..., D_ℓ as vertex ids
    std::vector<NbEdge> edges;             // every edge of B_ℓ(v)
    std::unordered_map<int, int> index;    // vertex id -> exploration index

    std::size_t size() const { return order.size(); }
    bool contains(int v) const { return index.count(v) > 0; }
    // Ulam-Harris address of the vertex at exploration index i; only
    // meaningful when the ball is a tree.
    std::vector<int> ulam_label(int i) const;
    std::string edge_list_text() const;
};

Neighbourhood explore(const WeightedGraph& graph, int v, int depth);

bool is_tree(const Neighbourhood& nb);

// Requires is_tree(nb). Node order follows the exploration order.
RootedWeightedTree to_rooted_tree(const Neighbourhood& nb, const WeightedGraph& graph);

// D_1^{(U)}(v): neighbours of v outside the ignore set.
std::vector<int> restricted_degree(const WeightedGraph& graph, int v, const std::unordered_set<int>& ignore);

// S_ℓ(𝒱) as a sorted vertex list (union of single-vertex balls).
std::vector<int> union_ball(const WeightedGraph& graph, const std::vector<int>& roots, int depth);

}  // namespace irg
