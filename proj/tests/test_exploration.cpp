#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>

#include "irg/exploration.hpp"
#include "irg/rng.hpp"
#include "irg/tree.hpp"

using namespace irg;

namespace {

EmpiricalWeights unit_weights(std::size_t n) {
    EmpiricalWeights e;
    e.n = n;
    e.W.assign(n, 1.0);
    e.theta = 1.0;
    return e;
}

std::vector<std::pair<int, int>> random_edges(Rng& rng, int n, double p) {
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.uniform() < p) e.emplace_back(a, b);
    return e;
}

// all-pairs distances, INF when disconnected
std::vector<std::vector<int>> floyd_warshall(int n, const std::vector<std::pair<int, int>>& edges) {
    const int INF = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, INF));
    for (int i = 0; i < n; ++i) d[i][i] = 0;
    for (auto [a, b] : edges) d[a][b] = d[b][a] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

bool acyclic(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [a, b] : edges) {
        const int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return true;
}

// rooted trees as parent arrays, node 0 the root
using Shape = std::vector<int>;

bool isomorphic(const Shape& a, const Shape& b) {
    if (a.size() != b.size()) return false;
    const int n = static_cast<int>(a.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        if (perm[0] != 0) continue;
        bool ok = true;
        for (int i = 1; i < n && ok; ++i) ok = perm[a[i]] == b[perm[i]];
        if (ok) return true;
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return false;
}

RootedWeightedTree from_shape(const Shape& s) {
    auto t = RootedWeightedTree::root_only(1.0);
    for (std::size_t i = 1; i < s.size(); ++i) t.add_child(s[i], 1.0, 0.0, 0.0);
    return t;
}

}  // namespace

TEST_CASE("isolated vertex") {
    const auto g = graph_from_edges(unit_weights(3), {{1, 2}});
    for (int depth : {0, 1, 4}) {
        const auto nb = explore(g, 0, depth);
        CHECK(nb.size() == 1);
        CHECK(nb.edges.empty());
        CHECK(is_tree(nb));
    }
    CHECK_THROWS_AS(explore(g, 3, 1), std::out_of_range);
}

TEST_CASE("path levels") {
    const auto g = graph_from_edges(unit_weights(3), {{0, 1}, {1, 2}});
    CHECK(explore(g, 0, 1).levels[1] == std::vector<int>{1});
    CHECK(explore(g, 0, 2).levels[2] == std::vector<int>{2});
    CHECK(explore(g, 0, 1).size() == 2);
}

TEST_CASE("triangle and star") {
    const auto tri = graph_from_edges(unit_weights(3), {{0, 1}, {1, 2}, {0, 2}});
    for (int v = 0; v < 3; ++v) CHECK(!is_tree(explore(tri, v, 1)));
    const auto star = graph_from_edges(unit_weights(6), {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    CHECK(is_tree(explore(star, 0, 1)));
}

TEST_CASE("balls, levels, edges and order match independent oracles") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(11));
        const auto edges = random_edges(rng, n, 0.1 + 0.4 * rng.uniform());
        const auto g = graph_from_edges(unit_weights(n), edges);
        const auto d = floyd_warshall(n, edges);
        for (int v = 0; v < n; ++v)
            for (int depth = 0; depth <= 4; ++depth) {
                const auto nb = explore(g, v, depth);
                std::set<int> ball;
                for (int u = 0; u < n; ++u)
                    if (d[v][u] <= depth) ball.insert(u);
                CHECK(std::set<int>(nb.order.begin(), nb.order.end()) == ball);
                for (std::size_t i = 0; i < nb.size(); ++i) CHECK(nb.level[i] == d[v][nb.order[i]]);
                for (int r = 0; r <= depth; ++r)
                    for (int u : nb.levels[r]) CHECK(d[v][u] == r);
                // every non-root vertex has a neighbour one level up
                for (std::size_t i = 1; i < nb.size(); ++i) {
                    const int p = nb.order[static_cast<std::size_t>(nb.parent[i])];
                    CHECK(g.has_edge(p, nb.order[i]));
                    CHECK(d[v][p] + 1 == d[v][nb.order[i]]);
                }
                // edge set: the subgraph induced by the ball
                std::set<std::pair<int, int>> want, got;
                for (auto [a, b] : edges)
                    if (ball.count(a) && ball.count(b)) want.emplace(a, b);
                for (const auto& e : nb.edges) got.emplace(std::min(e.a, e.b), std::max(e.a, e.b));
                CHECK(got == want);
                CHECK(got.size() == nb.edges.size());
                std::vector<std::pair<int, int>> relabelled;
                std::vector<int> idx(n, -1);
                for (std::size_t i = 0; i < nb.size(); ++i) idx[nb.order[i]] = static_cast<int>(i);
                for (auto [a, b] : want) relabelled.emplace_back(idx[a], idx[b]);
                CHECK(is_tree(nb) == acyclic(static_cast<int>(nb.size()), relabelled));
                // breadth-first replay with ascending labels
                std::vector<int> order{v};
                std::vector<int> lev(n, -1);
                lev[v] = 0;
                for (std::size_t q = 0; q < order.size(); ++q) {
                    const int x = order[q];
                    if (lev[x] >= depth) continue;
                    std::vector<int> nbrs;
                    for (auto [a, b] : edges) {
                        if (a == x) nbrs.push_back(b);
                        if (b == x) nbrs.push_back(a);
                    }
                    std::sort(nbrs.begin(), nbrs.end());
                    for (int y : nbrs)
                        if (lev[y] < 0) {
                            lev[y] = lev[x] + 1;
                            order.push_back(y);
                        }
                }
                CHECK(order == nb.order);
            }
    }
}

TEST_CASE("to_rooted_tree") {
    const auto single = graph_from_edges(unit_weights(1), {});
    const auto t0 = to_rooted_tree(explore(single, 0, 2), single);
    CHECK(t0.size() == 1);

    auto path = graph_from_edges(unit_weights(2), {{0, 1}});
    set_explicit_marks(path, {0.0, 0.0}, {{pair_key(0, 1), 0.7}});
    const auto t1 = to_rooted_tree(explore(path, 0, 1), path);
    REQUIRE(t1.size() == 2);
    CHECK(t1.root_degree() == 1);
    CHECK(t1.nodes[1].edge_weight == 0.7);
    CHECK(t1.nodes[1].source == 1);

    const auto tri = graph_from_edges(unit_weights(3), {{0, 1}, {1, 2}, {0, 2}});
    CHECK_THROWS_AS(to_rooted_tree(explore(tri, 0, 1), tri), std::invalid_argument);
}

TEST_CASE("canonical codes are invariant under relabelling") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(12));
        // random labelled tree
        std::vector<std::pair<int, int>> edges;
        for (int i = 1; i < n; ++i) edges.emplace_back(static_cast<int>(rng.below(i)), i);
        std::vector<double> W(n), vw(n);
        for (int i = 0; i < n; ++i) {
            W[i] = 1.0 + static_cast<double>(rng.below(3));
            vw[i] = static_cast<double>(rng.below(4)) / 4.0;
        }
        std::unordered_map<std::uint64_t, double> ew;
        for (auto [a, b] : edges) ew[pair_key(a, b)] = static_cast<double>(rng.below(4)) / 8.0;

        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> W2(n), vw2(n);
        std::vector<std::pair<int, int>> edges2;
        std::unordered_map<std::uint64_t, double> ew2;
        for (int i = 0; i < n; ++i) {
            W2[perm[i]] = W[i];
            vw2[perm[i]] = vw[i];
        }
        for (auto [a, b] : edges) {
            edges2.emplace_back(perm[a], perm[b]);
            ew2[pair_key(perm[a], perm[b])] = ew.at(pair_key(a, b));
        }
        EmpiricalWeights e1{static_cast<std::size_t>(n), W, 1.0}, e2{static_cast<std::size_t>(n), W2, 1.0};
        auto g1 = graph_from_edges(e1, edges);
        auto g2 = graph_from_edges(e2, edges2);
        set_explicit_marks(g1, vw, ew);
        set_explicit_marks(g2, vw2, ew2);
        const int root = static_cast<int>(rng.below(n));
        const auto c1 = canonical_code(to_rooted_tree(explore(g1, root, n), g1));
        const auto c2 = canonical_code(to_rooted_tree(explore(g2, perm[root], n), g2));
        CHECK(c1 == c2);
        // changing one weight bit changes the code
        if (!edges.empty()) {
            auto bumped = ew;
            const auto key = pair_key(edges[0].first, edges[0].second);
            bumped[key] = std::nextafter(bumped[key], 1.0);
            auto g3 = graph_from_edges(e1, edges);
            set_explicit_marks(g3, vw, bumped);
            CHECK(canonical_code(to_rooted_tree(explore(g3, root, n), g3)) != c1);
        }
    }
}

TEST_CASE("canonical codes on small shapes") {
    auto cherry = RootedWeightedTree::root_only(1.0);
    cherry.add_child(0, 1.0, 0.0, 0.5);
    cherry.add_child(0, 1.0, 0.0, 0.25);
    auto swapped = RootedWeightedTree::root_only(1.0);
    swapped.add_child(0, 1.0, 0.0, 0.25);
    swapped.add_child(0, 1.0, 0.0, 0.5);
    CHECK(canonical_code(cherry) == canonical_code(swapped));
    auto path = RootedWeightedTree::root_only(1.0);
    path.add_child(0, 1.0, 0.0, 0.5);
    path.add_child(1, 1.0, 0.0, 0.25);
    CHECK(canonical_code(path) != canonical_code(cherry));
    CHECK(canonical_code(path, CodeOptions::shape_only()) != canonical_code(cherry, CodeOptions::shape_only()));
    CHECK(!canonical_code(path).hex().empty());
}

TEST_CASE("code equality matches brute-force isomorphism on all rooted trees up to 6 nodes") {
    std::vector<Shape> shapes;
    std::function<void(Shape&, int)> grow = [&](Shape& s, int n) {
        if (static_cast<int>(s.size()) == n) {
            shapes.push_back(s);
            return;
        }
        for (int p = 0; p < static_cast<int>(s.size()); ++p) {
            s.push_back(p);
            grow(s, n);
            s.pop_back();
        }
    };
    for (int n = 1; n <= 6; ++n) {
        Shape s{-1};
        grow(s, n);
    }
    CHECK(shapes.size() == 1 + 1 + 2 + 6 + 24 + 120);
    std::vector<CanonicalCode> codes;
    for (const auto& s : shapes) codes.push_back(canonical_code(from_shape(s), CodeOptions::shape_only()));
    std::set<CanonicalCode> distinct(codes.begin(), codes.end());
    CHECK(distinct.size() == 1 + 1 + 2 + 4 + 9 + 20);  // rooted unlabelled trees
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = i; j < shapes.size(); ++j) CHECK((codes[i] == codes[j]) == isomorphic(shapes[i], shapes[j]));
}

TEST_CASE("restricted degree") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(9));
        const auto edges = random_edges(rng, n, 0.5);
        const auto g = graph_from_edges(unit_weights(n), edges);
        const int v = static_cast<int>(rng.below(n));
        const auto full = restricted_degree(g, v, {});
        CHECK(full.size() == g.degree(v));
        std::unordered_set<int> all_nbrs(g.neighbours(v).begin(), g.neighbours(v).end());
        CHECK(restricted_degree(g, v, all_nbrs).empty());
        std::unordered_set<int> U;
        for (int u = 0; u < n; ++u)
            if (u != v && rng.uniform() < 0.4) U.insert(u);
        CHECK(g.degree(v) <= restricted_degree(g, v, U).size() + U.size());
    }
}

TEST_CASE("union of balls") {
    const auto g = graph_from_edges(unit_weights(6), {{0, 1}, {1, 2}, {3, 4}});
    CHECK(union_ball(g, {0, 3}, 1) == std::vector<int>{0, 1, 3, 4});
    CHECK(union_ball(g, {0, 2}, 1) == std::vector<int>{0, 1, 2});
}
