#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "irg/applications.hpp"
#include "irg/distributions.hpp"

using namespace irg;

namespace {

EmpiricalWeights const_weights(std::size_t n, double c) {
    EmpiricalWeights e;
    e.n = n;
    e.W.assign(n, c);
    e.theta = c;
    return e;
}

// dyadic values keep every sum and difference exact
double dyadic(Rng& rng) { return static_cast<double>(1 + rng.below(1024)) / 256.0; }

WeightedEdgeList random_edge_list(Rng& rng, int n, double p) {
    WeightedEdgeList g;
    g.n = n;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.uniform() < p) g.edges.emplace_back(a, b, dyadic(rng));
    return g;
}

// maximum over all matchings by include/exclude recursion on the edge list
double brute_force_matching(const WeightedEdgeList& g) {
    std::vector<char> used(static_cast<std::size_t>(g.n), 0);
    std::function<double(std::size_t)> go = [&](std::size_t i) -> double {
        if (i == g.edges.size()) return 0.0;
        double best = go(i + 1);
        const auto [a, b, w] = g.edges[i];
        if (!used[static_cast<std::size_t>(a)] && !used[static_cast<std::size_t>(b)]) {
            used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = 1;
            best = std::max(best, w + go(i + 1));
            used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(b)] = 0;
        }
        return best;
    };
    return go(0);
}

void check_is_matching(const WeightedEdgeList& g, const Matching& m) {
    std::set<int> seen;
    double total = 0.0;
    for (auto [a, b] : m.edges) {
        CHECK(seen.insert(a).second);
        CHECK(seen.insert(b).second);
        bool found = false;
        for (const auto& [x, y, w] : g.edges)
            if ((x == a && y == b) || (x == b && y == a)) {
                found = true;
                total += w;
            }
        CHECK(found);
    }
    CHECK(total == m.value);
}

// random tree on n nodes, parent of i drawn from 0..i-1
RootedWeightedTree random_tree(Rng& rng, int n) {
    auto t = RootedWeightedTree::root_only(1.0);
    for (int i = 1; i < n; ++i) t.add_child(static_cast<int>(rng.below(static_cast<std::uint64_t>(i))), 1.0, 0.0, dyadic(rng));
    return t;
}

WeightedGraph tree_graph(Rng& rng, int n, const Seed& seed) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(i))), i);
    auto g = graph_from_edges(const_weights(static_cast<std::size_t>(n), 1.0), edges, seed);
    std::unordered_map<std::uint64_t, double> ew;
    for (auto [a, b] : edges) ew[pair_key(a, b)] = dyadic(rng);
    set_explicit_marks(g, std::vector<double>(static_cast<std::size_t>(n), 0.0), ew);
    return g;
}

const MarkLaws dyadic_marks{WeightSpec::finite_discrete({0.25, 0.5, 1.5, 3.0}, {0.25, 0.25, 0.25, 0.25}),
                            WeightSpec::finite_discrete({0.125, 1.0, 2.5}, {0.5, 0.25, 0.25})};

}  // namespace

TEST_CASE("dependent edge sum examples") {
    auto w = const_weights(2, 1.0);
    auto empty = graph_from_edges(w, {});
    CHECK(dependent_edge_sum(empty) == 0.0);
    auto g = graph_from_edges(w, {{0, 1}});
    set_explicit_marks(g, {1.0, 2.0}, {});
    CHECK(dependent_edge_sum(g) == 3.0);
    CHECK(dependent_edge_sum_by_degree(g) == 3.0);
}

TEST_CASE("edge sum by edges and by degrees agree") {
    for (int r = 0; r < 100; ++r) {
        const std::size_t n = 5 + static_cast<std::size_t>(r % 45);
        const auto w = const_weights(n, 2.0);
        const auto g = sample_graph(w, Seed::parse("a1"), static_cast<std::uint64_t>(r), dyadic_marks);
        CHECK(dependent_edge_sum(g) == dependent_edge_sum_by_degree(g));
    }
}

TEST_CASE("delta N closed forms match recomputation") {
    Rng rng(5);
    int nonzero = 0;
    for (int r = 0; r < 400; ++r) {
        const std::size_t n = 4 + static_cast<std::size_t>(r % 20);
        const auto g = sample_graph(const_weights(n, 1.5), Seed::parse("a2"), static_cast<std::uint64_t>(r), dyadic_marks);
        const int u = static_cast<int>(rng.below(n));
        int v = static_cast<int>(rng.below(n - 1));
        if (v >= u) ++v;
        for (const Site s : {Site::vertex(u), Site::edge(u, v)}) {
            PerturbationSet f;
            f.items = {s};
            const double direct = dependent_edge_sum(g) - dependent_edge_sum(perturb(g, f));
            CHECK(delta_N(g, s) == direct);
            nonzero += direct != 0.0;
            const auto env = envelope_bounds(Application::edge_sum, s, g);
            CHECK(env.delta == direct);
            CHECK(env.holds());
        }
        if (g.primary_edge(u, v) == g.replacement_edge(u, v)) CHECK(delta_N(g, Site::edge(u, v)) == 0.0);
        if (g.degree(u) == 0) CHECK(delta_N(g, Site::vertex(u)) == 0.0);
    }
    CHECK(nonzero > 100);
}

TEST_CASE("matching examples") {
    WeightedEdgeList one{2, {{0, 1, 2.5}}};
    CHECK(max_weight_matching(one).value == 2.5);
    WeightedEdgeList tri{3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}}};
    CHECK(max_weight_matching(tri).value == 3.0);
    WeightedEdgeList path{4, {{0, 1, 2.0}, {1, 2, 3.0}, {2, 3, 2.0}}};
    const auto m = max_weight_matching(path);
    CHECK(m.value == 4.0);
    CHECK(m.edges.size() == 2);
    check_is_matching(path, m);
    CHECK_THROWS_AS(max_weight_matching(WeightedEdgeList{25, {}}), SolverLimitExceeded);
}

TEST_CASE("matching solver equals enumeration on every small graph") {
    Rng rng(8);
    for (int n = 1; n <= 5; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
        for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
            WeightedEdgeList g;
            g.n = n;
            for (std::size_t i = 0; i < pairs.size(); ++i)
                if (mask >> i & 1u) g.edges.emplace_back(pairs[i].first, pairs[i].second, dyadic(rng));
            const auto m = max_weight_matching(g);
            CHECK(m.value == brute_force_matching(g));
            check_is_matching(g, m);
        }
    }
    for (int r = 0; r < 300; ++r) {
        const auto g = random_edge_list(rng, 6 + r % 3, 0.2 + 0.6 * rng.uniform());
        const auto m = max_weight_matching(g);
        CHECK(m.value == brute_force_matching(g));
        check_is_matching(g, m);
    }
}

TEST_CASE("tree programme equals the subset solver") {
    Rng rng(12);
    for (int r = 0; r < 300; ++r) {
        const auto t = random_tree(rng, 1 + r % 24);
        const auto el = WeightedEdgeList::of(t);
        const auto m = max_weight_matching(t);
        CHECK(m.value == max_weight_matching(el).value);
        check_is_matching(el, m);
    }
}

TEST_CASE("h values") {
    WeightedEdgeList iso{3, {{1, 2, 1.0}}};
    CHECK(h_value(iso, 0) == 0.0);
    WeightedEdgeList one{2, {{0, 1, 1.75}}};
    CHECK(h_value(one, 0) == 1.75);
    Rng rng(21);
    for (int r = 0; r < 400; ++r) {
        const int n = 2 + r % 9;
        const auto g = random_edge_list(rng, n, 0.15 + 0.7 * rng.uniform());
        const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const double M = max_weight_matching(g).value;
        const auto gv = g.without({v});
        // M(G) = max{M(G−v), max_u w_vu + M(G−{v,u})}
        double rhs = max_weight_matching(gv).value;
        double best = 0.0;
        for (const auto& [a, b, w] : g.edges) {
            if (a != v && b != v) continue;
            const int u = a == v ? b : a;
            rhs = std::max(rhs, w + max_weight_matching(g.without({v, u})).value);
            best = std::max(best, w - h_value(gv, u));
        }
        CHECK(M == rhs);
        CHECK(M >= max_weight_matching(gv).value);
        const double h = h_value(g, v);
        CHECK(h >= 0.0);
        CHECK(h == best);
    }
}

TEST_CASE("h_k examples and pruning") {
    CHECK(h_k(RootedWeightedTree::root_only(1.0), 3) == 0.0);
    auto star = RootedWeightedTree::root_only(1.0);
    star.add_child(0, 1.0, 0.0, 0.5);
    star.add_child(0, 1.0, 0.0, 2.25);
    CHECK(h_k(star, 1) == 2.25);
    CHECK(h_k(star, 0) == 0.0);
    Rng rng(30);
    for (int r = 0; r < 500; ++r) {
        const auto t = random_tree(rng, 2 + r % 30);
        for (int k = 0; k <= 6; ++k) CHECK(h_k(t, k) == h_k(t.truncated(k), k));
    }
}

TEST_CASE("even and odd depth values bracket and move monotonically") {
    Rng rng(31);
    for (int r = 0; r < 1000; ++r) {
        const auto t = random_tree(rng, 2 + r % 40);
        const int H = t.height();
        for (int k = 0; k <= 4; ++k) {
            CHECK(h_k(t, 2 * k) <= h_k(t, 2 * k + 1));
            CHECK(h_k(t, 2 * k) <= h_k(t, 2 * k + 2));
            CHECK(h_k(t, 2 * k + 3) <= h_k(t, 2 * k + 1));
        }
        // once k exceeds the height the recursion is the exact h
        if (t.size() <= exact_matching_limit) CHECK(h_k(t, H + 1) == h_value(WeightedEdgeList::of(t), 0));
    }
}

TEST_CASE("sandwich examples") {
    const auto root = RootedWeightedTree::root_only(1.0);
    for (int k = 1; k <= 4; ++k) {
        const auto s = matching_sandwich(root, k);
        CHECK(s.gL == 0.0);
        CHECK(s.gU == 0.0);
    }
    auto star = RootedWeightedTree::root_only(1.0);
    for (double w : {0.5, 3.0, 1.25}) star.add_child(0, 1.0, 0.0, w);
    const auto s3 = matching_sandwich(star, 3);
    CHECK(s3.kU == 3);
    CHECK(s3.kL == 2);
    CHECK(s3.gL == 3.0);
    CHECK(s3.gU == 3.0);
    // at k = 2 the lower level is 0, where the recursion is identically zero
    const auto s2 = matching_sandwich(star, 2);
    CHECK(s2.kU == 1);
    CHECK(s2.kL == 0);
    CHECK(s2.gL == 0.0);
    CHECK(s2.gU == 3.0);
    CHECK_THROWS(matching_sandwich(star, 0));
}

TEST_CASE("sandwich holds on tree-shaped graphs") {
    Rng rng(40);
    int strict = 0;
    for (int r = 0; r < 300; ++r) {
        const int n = 2 + r % 19;
        const auto g = tree_graph(rng, n, Seed::parse("a4"));
        const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const double h = h_value(g, v);
        for (int k : {1, 2, 3, 4}) {
            const auto nb = explore(g, v, k);
            REQUIRE(is_tree(nb));
            const auto s = matching_sandwich(nb, g, k);
            CHECK(s.gL <= h);
            CHECK(h <= s.gU);
            strict += s.gL < s.gU;
        }
    }
    CHECK(strict > 0);
    const auto tri = graph_from_edges(const_weights(3, 1.0), {{0, 1}, {1, 2}, {0, 2}});
    CHECK_THROWS(matching_sandwich(explore(tri, 0, 1), tri, 1));
    CHECK_THROWS(matching_sandwich(explore(tri, 0, 1), tri, 2));
}

TEST_CASE("matching envelope") {
    Rng rng(50);
    int active = 0;
    for (int r = 0; r < 400; ++r) {
        const std::size_t n = 3 + static_cast<std::size_t>(r % 8);
        const auto g = sample_graph(const_weights(n, 1.2), Seed::parse("a5"), static_cast<std::uint64_t>(r), dyadic_marks);
        const int u = static_cast<int>(rng.below(n));
        int v = static_cast<int>(rng.below(n - 1));
        if (v >= u) ++v;
        const auto c = envelope_bounds(Application::matching, Site::edge(u, v), g);
        CHECK(c.holds());
        if (!g.primary_edge(u, v) && !g.replacement_edge(u, v)) {
            CHECK(c.delta == 0.0);
            CHECK(c.envelope == 0.0);
        } else {
            ++active;
        }
        const auto cv = envelope_bounds(Application::matching, Site::vertex(u), g);
        CHECK(cv.delta == 0.0);
    }
    CHECK(active > 50);
    CHECK(parse_application("edge-sum") == Application::edge_sum);
    CHECK(std::string(to_string(parse_application("matching"))) == "matching");
    CHECK_THROWS(parse_application("sum"));
}

TEST_CASE("sixth moment of the matching envelope") {
    // E[max(A,B)^6] for i.i.d. Exp(1): the density of the max is 2e^{-x}(1 - e^{-x}).
    auto f = [](double x) { return std::pow(x, 6) * 2.0 * std::exp(-x) * (1.0 - std::exp(-x)); };
    const int steps = 200000;
    const double hi = 120.0, h = hi / steps;
    double simpson = f(0) + f(hi);
    for (int i = 1; i < steps; ++i) simpson += (i % 2 ? 4.0 : 2.0) * f(i * h);
    simpson *= h / 3.0;
    const double closed = 2.0 * 720.0 - 2.0 * 720.0 / 128.0;
    CHECK(simpson == doctest::Approx(closed).epsilon(1e-9));

    Rng rng(60);
    const int draws = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < draws; ++i) {
        const double m = std::max(sample_exponential(rng), sample_exponential(rng));
        const double x = std::pow(m, 6);
        s += x;
        s2 += x * x;
    }
    const double mean = s / draws;
    const double se = std::sqrt((s2 / draws - mean * mean) / draws);
    CHECK(std::abs(mean - closed) <= 4.0 * se);
}
