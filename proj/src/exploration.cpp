#include "irg/exploration.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace irg {

Neighbourhood explore(const WeightedGraph& graph, int v, int depth) {
    if (v < 0 || static_cast<std::size_t>(v) >= graph.n()) throw std::out_of_range("explore: vertex out of range");
    if (depth < 0) throw std::invalid_argument("explore: negative depth");
    Neighbourhood nb;
    nb.root = v;
    nb.depth = depth;
    nb.order.push_back(v);
    nb.level.push_back(0);
    nb.parent.push_back(-1);
    nb.index.emplace(v, 0);
    nb.levels.assign(static_cast<std::size_t>(depth) + 1, {});
    nb.levels[0].push_back(v);
    // Entries before `next` are completed; the rest are active. Vertices not
    // in `index` are unexplored.
    for (std::size_t next = 0; next < nb.order.size(); ++next) {
        const int r = nb.level[next];
        const int vj = nb.order[next];
        if (r >= depth) {
            // B_ℓ is vertex-induced: keep edges between two level-ℓ vertices
            for (int u : graph.neighbours(vj)) {
                auto it = nb.index.find(u);
                if (it != nb.index.end() && static_cast<std::size_t>(it->second) > next)
                    nb.edges.push_back({vj, u, r, false});
            }
            continue;
        }
        for (int u : graph.neighbours(vj)) {
            auto it = nb.index.find(u);
            if (it == nb.index.end()) {
                const int id = static_cast<int>(nb.order.size());
                nb.order.push_back(u);
                nb.level.push_back(r + 1);
                nb.parent.push_back(static_cast<int>(next));
                nb.index.emplace(u, id);
                nb.levels[static_cast<std::size_t>(r) + 1].push_back(u);
                nb.edges.push_back({vj, u, r, true});
            } else if (static_cast<std::size_t>(it->second) > next) {
                nb.edges.push_back({vj, u, r, false});
            }
        }
    }
    return nb;
}

bool is_tree(const Neighbourhood& nb) { return nb.edges.size() + 1 == nb.order.size(); }

std::vector<int> Neighbourhood::ulam_label(int i) const {
    std::vector<int> label;
    while (parent.at(static_cast<std::size_t>(i)) >= 0) {
        const int p = parent[static_cast<std::size_t>(i)];
        int rank = 1;
        for (int j = p + 1; j < i; ++j)
            if (parent[static_cast<std::size_t>(j)] == p) ++rank;
        label.push_back(rank);
        i = p;
    }
    std::reverse(label.begin(), label.end());
    return label;
}

std::string Neighbourhood::edge_list_text() const {
    std::ostringstream os;
    for (const auto& e : edges) os << e.a << ' ' << e.b << ' ' << e.level << (e.tree_edge ? " tree" : " extra") << '\n';
    return os.str();
}

RootedWeightedTree to_rooted_tree(const Neighbourhood& nb, const WeightedGraph& graph) {
    if (!is_tree(nb)) throw std::invalid_argument("to_rooted_tree: neighbourhood is not a tree");
    const auto& W = graph.weights().W;
    RootedWeightedTree t =
        RootedWeightedTree::root_only(W[static_cast<std::size_t>(nb.root)], graph.vertex_weight(nb.root), nb.root);
    for (std::size_t i = 1; i < nb.order.size(); ++i) {
        const int u = nb.order[i];
        const int p = nb.parent[i];
        t.add_child(p, W[static_cast<std::size_t>(u)], graph.vertex_weight(u),
                    graph.edge_weight(nb.order[static_cast<std::size_t>(p)], u), u);
    }
    return t;
}

std::vector<int> restricted_degree(const WeightedGraph& graph, int v, const std::unordered_set<int>& ignore) {
    if (ignore.count(v)) throw std::invalid_argument("restricted_degree: v must not be ignored");
    std::vector<int> out;
    for (int u : graph.neighbours(v))
        if (!ignore.count(u)) out.push_back(u);
    return out;
}

std::vector<int> union_ball(const WeightedGraph& graph, const std::vector<int>& roots, int depth) {
    std::vector<int> all;
    for (int r : roots) {
        const auto nb = explore(graph, r, depth);
        all.insert(all.end(), nb.order.begin(), nb.order.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

}  // namespace irg
