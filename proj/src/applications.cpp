#include "irg/applications.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace irg {

double dependent_edge_sum(const WeightedGraph& g) {
    double total = 0.0;
    for (const auto& [u, v] : g.edge_list()) total += g.vertex_weight(u) + g.vertex_weight(v);
    return total;
}

double dependent_edge_sum_by_degree(const WeightedGraph& g) {
    double total = 0.0;
    for (std::size_t v = 0; v < g.n(); ++v) {
        const int x = static_cast<int>(v);
        total += static_cast<double>(g.degree(x)) * g.vertex_weight(x);
    }
    return total;
}

double delta_N(const WeightedGraph& g, const Site& site) {
    if (site.is_vertex()) {
        const int v = site.u;
        const double now = g.vertex_weight(v);
        const double other = g.is_perturbed(site) ? g.primary_vertex_weight(v) : g.replacement_vertex_weight(v);
        return static_cast<double>(g.degree(v)) * (now - other);
    }
    const int u = site.u, v = site.v;
    const int x = g.has_edge(u, v) ? 1 : 0;
    const int xp = (g.is_perturbed(site) ? g.primary_edge(u, v) : g.replacement_edge(u, v)) ? 1 : 0;
    return (g.vertex_weight(u) + g.vertex_weight(v)) * (x - xp);
}

WeightedEdgeList WeightedEdgeList::of(const WeightedGraph& g) {
    WeightedEdgeList out;
    out.n = static_cast<int>(g.n());
    for (const auto& [u, v] : g.edge_list()) out.edges.emplace_back(u, v, g.edge_weight(u, v));
    return out;
}

WeightedEdgeList WeightedEdgeList::of(const RootedWeightedTree& t) {
    WeightedEdgeList out;
    out.n = static_cast<int>(t.size());
    for (std::size_t i = 1; i < t.size(); ++i)
        out.edges.emplace_back(t.nodes[i].parent, static_cast<int>(i), t.nodes[i].edge_weight);
    return out;
}

WeightedEdgeList WeightedEdgeList::without(const std::vector<int>& vertices) const {
    WeightedEdgeList out;
    out.n = n;
    for (const auto& e : edges) {
        const int a = std::get<0>(e), b = std::get<1>(e);
        if (std::find(vertices.begin(), vertices.end(), a) != vertices.end()) continue;
        if (std::find(vertices.begin(), vertices.end(), b) != vertices.end()) continue;
        out.edges.push_back(e);
    }
    return out;
}

namespace {

class SubsetSolver {
public:
    explicit SubsetSolver(const WeightedEdgeList& g) : adj_(static_cast<std::size_t>(g.n)) {
        for (const auto& [a, b, w] : g.edges) {
            if (a == b) throw std::invalid_argument("max_weight_matching: self-loop");
            if (w < 0.0) throw std::invalid_argument("max_weight_matching: negative edge weight");
            adj_[static_cast<std::size_t>(a)].emplace_back(b, w);
            adj_[static_cast<std::size_t>(b)].emplace_back(a, w);
        }
        for (auto& row : adj_) std::sort(row.begin(), row.end());
    }

    // M(S) = max{M(S − v), max_u w_vu + M(S − {v, u})} with v the lowest vertex of S.
    double value(std::uint32_t s) {
        // vertices without an edge inside S can be dropped directly
        while (s) {
            const int v = std::countr_zero(s);
            bool any = false;
            for (const auto& [u, w] : adj_[static_cast<std::size_t>(v)])
                if (s >> u & 1u) {
                    any = true;
                    break;
                }
            if (any) break;
            s &= s - 1;
        }
        if (!s) return 0.0;
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
        const int v = std::countr_zero(s);
        const std::uint32_t rest = s & (s - 1);
        double best = value(rest);
        for (const auto& [u, w] : adj_[static_cast<std::size_t>(v)])
            if (rest >> u & 1u) best = std::max(best, w + value(rest & ~(1u << u)));
        memo_.emplace(s, best);
        return best;
    }

    Matching witness(std::uint32_t s) {
        Matching m;
        m.value = value(s);
        while (s) {
            const int v = std::countr_zero(s);
            const std::uint32_t rest = s & (s - 1);
            const double target = value(s);
            int partner = -1;
            if (value(rest) != target) {
                for (const auto& [u, w] : adj_[static_cast<std::size_t>(v)])
                    if ((rest >> u & 1u) && w + value(rest & ~(1u << u)) == target) {
                        partner = u;
                        break;
                    }
            }
            if (partner < 0) {
                s = rest;
            } else {
                m.edges.emplace_back(v, partner);
                s = rest & ~(1u << partner);
            }
        }
        return m;
    }

private:
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::unordered_map<std::uint32_t, double> memo_;
};

std::uint32_t full_set(int n) { return n == 32 ? ~0u : ((1u << n) - 1u); }

void check_limit(int n) {
    if (n > exact_matching_limit)
        throw SolverLimitExceeded("exact matching is limited to " + std::to_string(exact_matching_limit) + " vertices");
}

}  // namespace

Matching max_weight_matching(const WeightedEdgeList& g) {
    check_limit(g.n);
    SubsetSolver solver(g);
    return solver.witness(full_set(g.n));
}

Matching max_weight_matching(const WeightedGraph& g) {
    check_limit(static_cast<int>(g.n()));
    return max_weight_matching(WeightedEdgeList::of(g));
}

Matching max_weight_matching(const RootedWeightedTree& t) {
    const std::size_t n = t.size();
    Matching m;
    if (n == 0) return m;
    // free[u]: best in the subtree of u with u unmatched; best[u]: overall.
    std::vector<double> free(n, 0.0), best(n, 0.0);
    std::vector<int> mate(n, -1);
    const auto order = t.bfs_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto u = static_cast<std::size_t>(*it);
        double sum = 0.0;
        for (int c : t.nodes[u].children) sum += best[static_cast<std::size_t>(c)];
        free[u] = sum;
        best[u] = sum;
        for (int c : t.nodes[u].children) {
            const auto ci = static_cast<std::size_t>(c);
            const double cand = sum - best[ci] + free[ci] + t.nodes[ci].edge_weight;
            if (cand > best[u]) {
                best[u] = cand;
                mate[u] = c;
            }
        }
    }
    m.value = best[0];
    // Recover the matching top-down.
    std::vector<char> matched_to_parent(n, 0);
    for (int x : order) {
        const auto u = static_cast<std::size_t>(x);
        if (matched_to_parent[u]) continue;
        if (mate[u] >= 0) {
            m.edges.emplace_back(x, mate[u]);
            matched_to_parent[static_cast<std::size_t>(mate[u])] = 1;
        }
    }
    return m;
}

double h_value(const WeightedEdgeList& g, int v) {
    if (v < 0 || v >= g.n) throw std::out_of_range("h_value: vertex out of range");
    check_limit(g.n);
    SubsetSolver solver(g);
    const std::uint32_t all = full_set(g.n);
    return solver.value(all) - solver.value(all & ~(1u << v));
}

double h_value(const WeightedGraph& g, int v) { return h_value(WeightedEdgeList::of(g), v); }

double h_k(const RootedWeightedTree& t, int k) {
    if (t.nodes.empty()) throw std::invalid_argument("h_k: empty tree");
    if (k < 0) throw std::invalid_argument("h_k: negative depth");
    std::vector<double> h(t.size(), 0.0);
    const auto order = t.bfs_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto u = static_cast<std::size_t>(*it);
        if (t.nodes[u].depth >= k) continue;
        double best = 0.0;
        for (int c : t.nodes[u].children) {
            const auto ci = static_cast<std::size_t>(c);
            best = std::max(best, t.nodes[ci].edge_weight - h[ci]);
        }
        h[u] = best;
    }
    return h[0];
}

SandwichResult matching_sandwich(const RootedWeightedTree& ball, int k) {
    if (k < 1) throw std::invalid_argument("matching_sandwich: k must be at least 1");
    SandwichResult r;
    r.kU = (k % 2 == 1) ? k : k - 1;
    r.kL = r.kU - 1;
    r.gL = h_k(ball.truncated(r.kL), r.kL);
    r.gU = h_k(ball.truncated(r.kU), r.kU);
    return r;
}

SandwichResult matching_sandwich(const Neighbourhood& nb, const WeightedGraph& g, int k) {
    if (nb.depth < k) throw std::invalid_argument("matching_sandwich: neighbourhood shallower than k");
    return matching_sandwich(to_rooted_tree(nb, g), k);
}

Application parse_application(const std::string& s) {
    if (s == "edge-sum") return Application::edge_sum;
    if (s == "matching") return Application::matching;
    throw std::invalid_argument("unknown application '" + s + "' (expected edge-sum or matching)");
}

const char* to_string(Application a) { return a == Application::edge_sum ? "edge-sum" : "matching"; }

EnvelopeCheck envelope_bounds(Application app, const Site& site, const WeightedGraph& g) {
    EnvelopeCheck c;
    PerturbationSet f;
    f.items = {site};
    if (app == Application::edge_sum) {
        c.delta = delta_N(g, site);
        if (site.is_vertex()) {
            c.envelope = static_cast<double>(g.degree(site.u)) *
                         (g.primary_vertex_weight(site.u) + g.replacement_vertex_weight(site.u));
        } else {
            const bool any = g.primary_edge(site.u, site.v) || g.replacement_edge(site.u, site.v);
            c.envelope = any ? g.vertex_weight(site.u) + g.vertex_weight(site.v) : 0.0;
        }
        return c;
    }
    // Matching carries no vertex weights, so vertex sites have no effect.
    if (site.is_vertex()) return c;
    const WeightedGraph h = perturb(g, f);
    c.delta = max_weight_matching(g).value - max_weight_matching(h).value;
    const bool any = g.primary_edge(site.u, site.v) || g.replacement_edge(site.u, site.v);
    c.envelope = any ? std::max(g.primary_edge_weight(site.u, site.v), g.replacement_edge_weight(site.u, site.v)) : 0.0;
    return c;
}

}  // namespace irg
