#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace irg {

struct TreeNode {
    int parent = -1;
    int depth = 0;
    double type = 0.0;           // connectivity type W
    double vertex_weight = 0.0;
    double edge_weight = 0.0;    // weight of the edge to the parent
    std::int64_t source = -1;    // graph vertex or empirical type index, if any
    std::vector<int> children;   // ordered; Ulam-Harris child j is children[j-1]
};

// Finite rooted tree; node 0 is the root.
class RootedWeightedTree {
public:
    std::vector<TreeNode> nodes;

    static RootedWeightedTree root_only(double type, double vertex_weight = 0.0, std::int64_t source = -1);

    int add_child(int parent, double type, double vertex_weight, double edge_weight, std::int64_t source = -1);

    std::size_t size() const { return nodes.size(); }
    int height() const;
    int root_degree() const { return nodes.empty() ? 0 : static_cast<int>(nodes[0].children.size()); }
    std::vector<int> bfs_order() const;
    // Copy keeping only nodes of depth <= depth, renumbered in breadth-first order.
    RootedWeightedTree truncated(int depth) const;
    // Ulam-Harris address of a node (empty for the root).
    std::vector<int> ulam_label(int node) const;
};

struct CodeOptions {
    bool types = true;
    bool vertex_weights = true;
    bool edge_weights = true;

    static CodeOptions shape_only() { return {false, false, false}; }
    static CodeOptions weights_only() { return {false, true, true}; }
};

struct CanonicalCode {
    std::string bytes;

    std::string hex() const;
    friend bool operator==(const CanonicalCode&, const CanonicalCode&) = default;
    friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
};

// AHU-style code: equal iff the trees are isomorphic as rooted trees with
// bit-identical types and weights (restricted to the selected fields).
CanonicalCode canonical_code(const RootedWeightedTree& t, CodeOptions opts = {});

}  // namespace irg
