#include "irg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_set>

namespace irg {

struct WeightedGraph::Csr {
    std::vector<std::size_t> offsets;
    std::vector<int> targets;

    static Csr build(std::size_t n, std::vector<std::pair<int, int>> edges) {
        for (auto& e : edges)
            if (e.first > e.second) std::swap(e.first, e.second);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        Csr c;
        c.offsets.assign(n + 1, 0);
        for (const auto& [a, b] : edges) {
            ++c.offsets[static_cast<std::size_t>(a) + 1];
            ++c.offsets[static_cast<std::size_t>(b) + 1];
        }
        for (std::size_t v = 0; v < n; ++v) c.offsets[v + 1] += c.offsets[v];
        c.targets.resize(c.offsets[n]);
        std::vector<std::size_t> fill(c.offsets.begin(), c.offsets.end() - 1);
        for (const auto& [a, b] : edges) {
            c.targets[fill[static_cast<std::size_t>(a)]++] = b;
            c.targets[fill[static_cast<std::size_t>(b)]++] = a;
        }
        for (std::size_t v = 0; v < n; ++v)
            std::sort(c.targets.begin() + static_cast<std::ptrdiff_t>(c.offsets[v]),
                      c.targets.begin() + static_cast<std::ptrdiff_t>(c.offsets[v + 1]));
        return c;
    }

    std::span<const int> row(int v) const {
        const auto b = offsets[static_cast<std::size_t>(v)];
        const auto e = offsets[static_cast<std::size_t>(v) + 1];
        return {targets.data() + b, e - b};
    }

    bool contains(int u, int v) const {
        auto r = row(u);
        return std::binary_search(r.begin(), r.end(), v);
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(targets.size() / 2);
        for (std::size_t v = 0; v + 1 < offsets.size(); ++v)
            for (int u : row(static_cast<int>(v)))
                if (static_cast<int>(v) < u) out.emplace_back(static_cast<int>(v), u);
        return out;
    }
};

struct WeightedGraph::Overlay {
    bool all = false;
    std::unordered_set<int> vertices;
    std::unordered_set<std::uint64_t> pairs;
};

struct WeightedGraph::Shared {
    EmpiricalWeights weights;
    MarkLaws marks;
    Seed seed;
    std::uint64_t stream = 0;
    std::shared_ptr<const Csr> primary;
    std::optional<std::vector<double>> explicit_vertex;
    std::optional<std::unordered_map<std::uint64_t, double>> explicit_edge;

    std::once_flag shadow_once;
    std::shared_ptr<const Csr> shadow;

    const Csr& replacement() {
        std::call_once(shadow_once, [this] { shadow = std::make_shared<const Csr>(generate(true)); });
        return *shadow;
    }

    // Weight-bucketed skip sampling. Vertices are grouped by floor(log2 W);
    // within a bucket pair candidate pairs arrive at rate q ≥ p_uv through
    // geometric skips and are then accepted with probability p_uv / q.
    Csr generate(bool replacement_flag) const {
        const std::size_t n = weights.n;
        const double scale = static_cast<double>(n) * weights.theta;
        std::map<int, std::vector<int>> buckets;
        for (std::size_t v = 0; v < n; ++v) buckets[std::ilogb(weights.W[v])].push_back(static_cast<int>(v));
        std::vector<std::pair<int, std::vector<int>>> list(buckets.begin(), buckets.end());
        std::vector<double> wmax(list.size(), 0.0);
        for (std::size_t i = 0; i < list.size(); ++i)
            for (int v : list[i].second) wmax[i] = std::max(wmax[i], weights.W[static_cast<std::size_t>(v)]);

        std::vector<std::pair<int, int>> edges;
        for (std::size_t a = 0; a < list.size(); ++a) {
            for (std::size_t b = a; b < list.size(); ++b) {
                const auto& va = list[a].second;
                const auto& vb = list[b].second;
                const std::uint64_t ma = va.size(), mb = vb.size();
                const std::uint64_t total = (a == b) ? ma * (ma - 1) / 2 : ma * mb;
                if (total == 0) continue;
                const double q = std::min(1.0, wmax[a] * wmax[b] / scale);
                if (!(q > 0.0)) continue;
                Rng rng(seed, stream, SiteKind::edge_bucket,
                        {static_cast<std::uint64_t>(list[a].first + 4096), static_cast<std::uint64_t>(list[b].first + 4096),
                         replacement_flag ? 1u : 0u});
                const double log_miss = std::log1p(-q);
                std::uint64_t pos = 0;
                bool first = true;
                std::uint64_t row = 0, row_start = 0;
                while (true) {
                    std::uint64_t step = 1;
                    if (q < 1.0) {
                        const double skip = std::floor(std::log(rng.uniform()) / log_miss);
                        if (skip >= static_cast<double>(total)) break;
                        step += static_cast<std::uint64_t>(skip);
                    }
                    if (first) {
                        pos = step - 1;
                        first = false;
                    } else {
                        pos += step;
                    }
                    if (pos >= total) break;
                    int u, v;
                    if (a == b) {
                        while (pos >= row_start + (ma - 1 - row)) {
                            row_start += ma - 1 - row;
                            ++row;
                        }
                        u = va[row];
                        v = va[row + 1 + (pos - row_start)];
                    } else {
                        u = va[pos / mb];
                        v = vb[pos % mb];
                    }
                    const double p = std::min(1.0, weights.W[static_cast<std::size_t>(u)] *
                                                       weights.W[static_cast<std::size_t>(v)] / scale);
                    if (rng.uniform() * q < p) edges.emplace_back(u, v);
                }
            }
        }
        return Csr::build(n, std::move(edges));
    }

    double mark(const std::optional<WeightSpec>& law, SiteKind kind, std::uint64_t key, bool replacement_flag) const {
        if (!law) return 0.0;
        return law->quantile(to_unit(site_key(seed, stream, kind, {key, replacement_flag ? 1u : 0u})));
    }
};

void PerturbationSet::validate(std::size_t n) const {
    std::unordered_set<std::uint64_t> seen;
    for (const Site& s : items) {
        if (s.u < 0 || static_cast<std::size_t>(s.u) >= n) throw std::out_of_range("perturbation site out of range");
        std::uint64_t key;
        if (s.is_vertex()) {
            key = ~static_cast<std::uint64_t>(s.u);
        } else {
            if (static_cast<std::size_t>(s.v) >= n) throw std::out_of_range("perturbation site out of range");
            if (s.u == s.v) throw std::invalid_argument("perturbation pair with equal endpoints");
            key = pair_key(s.u, s.v);
        }
        if (!seen.insert(key).second) throw std::invalid_argument("perturbation site listed twice");
    }
}

std::size_t WeightedGraph::n() const { return shared_->weights.n; }
const EmpiricalWeights& WeightedGraph::weights() const { return shared_->weights; }
const MarkLaws& WeightedGraph::marks() const { return shared_->marks; }
const Seed& WeightedGraph::seed() const { return shared_->seed; }
std::uint64_t WeightedGraph::stream() const { return shared_->stream; }

void WeightedGraph::check_vertex(int v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= n()) throw std::out_of_range("vertex out of range");
}

std::span<const int> WeightedGraph::neighbours(int v) const {
    check_vertex(v);
    return adj_->row(v);
}

bool WeightedGraph::has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return u != v && adj_->contains(u, v);
}

std::size_t WeightedGraph::edge_count() const { return adj_->targets.size() / 2; }

std::vector<std::pair<int, int>> WeightedGraph::edge_list() const { return adj_->edges(); }

bool WeightedGraph::is_perturbed(const Site& s) const {
    if (!overlay_) return false;
    if (overlay_->all) return true;
    return s.is_vertex() ? overlay_->vertices.count(s.u) > 0 : overlay_->pairs.count(pair_key(s.u, s.v)) > 0;
}

double WeightedGraph::vertex_weight(int v) const {
    return is_perturbed(Site::vertex(v)) ? replacement_vertex_weight(v) : primary_vertex_weight(v);
}

double WeightedGraph::edge_weight(int u, int v) const {
    return is_perturbed(Site::edge(u, v)) ? replacement_edge_weight(u, v) : primary_edge_weight(u, v);
}

bool WeightedGraph::primary_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return u != v && shared_->primary->contains(u, v);
}

bool WeightedGraph::replacement_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return u != v && shared_->replacement().contains(u, v);
}

double WeightedGraph::primary_vertex_weight(int v) const {
    check_vertex(v);
    if (shared_->explicit_vertex) return (*shared_->explicit_vertex)[static_cast<std::size_t>(v)];
    return shared_->mark(shared_->marks.vertex, SiteKind::vertex_mark, static_cast<std::uint64_t>(v), false);
}

double WeightedGraph::replacement_vertex_weight(int v) const {
    check_vertex(v);
    return shared_->mark(shared_->marks.vertex, SiteKind::vertex_mark, static_cast<std::uint64_t>(v), true);
}

double WeightedGraph::primary_edge_weight(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    if (shared_->explicit_edge) {
        auto it = shared_->explicit_edge->find(pair_key(u, v));
        return it == shared_->explicit_edge->end() ? 0.0 : it->second;
    }
    return shared_->mark(shared_->marks.edge, SiteKind::edge_mark, pair_key(u, v), false);
}

double WeightedGraph::replacement_edge_weight(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    return shared_->mark(shared_->marks.edge, SiteKind::edge_mark, pair_key(u, v), true);
}

WeightedGraph sample_graph(const EmpiricalWeights& weights, const Seed& seed, std::uint64_t stream, MarkLaws marks) {
    weights.validate();
    auto shared = std::make_shared<WeightedGraph::Shared>();
    shared->weights = weights;
    shared->marks = std::move(marks);
    shared->seed = seed;
    shared->stream = stream;
    shared->primary = std::make_shared<const WeightedGraph::Csr>(shared->generate(false));
    WeightedGraph g;
    g.shared_ = shared;
    g.adj_ = shared->primary;
    return g;
}

WeightedGraph graph_from_edges(const EmpiricalWeights& weights, const std::vector<std::pair<int, int>>& edges,
                               const Seed& seed, std::uint64_t stream, MarkLaws marks) {
    weights.validate();
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= weights.n || static_cast<std::size_t>(b) >= weights.n)
            throw std::out_of_range("graph_from_edges: vertex out of range");
        if (a == b) throw std::invalid_argument("graph_from_edges: self-loop");
    }
    auto shared = std::make_shared<WeightedGraph::Shared>();
    shared->weights = weights;
    shared->marks = std::move(marks);
    shared->seed = seed;
    shared->stream = stream;
    shared->primary = std::make_shared<const WeightedGraph::Csr>(WeightedGraph::Csr::build(weights.n, edges));
    WeightedGraph g;
    g.shared_ = shared;
    g.adj_ = shared->primary;
    return g;
}

void set_explicit_marks(WeightedGraph& g, std::vector<double> vertex_weights,
                        std::unordered_map<std::uint64_t, double> edge_weights) {
    if (vertex_weights.size() != g.n()) throw std::invalid_argument("set_explicit_marks: size mismatch");
    g.shared_->explicit_vertex = std::move(vertex_weights);
    g.shared_->explicit_edge = std::move(edge_weights);
}

WeightedGraph perturb(const WeightedGraph& graph, const PerturbationSet& f) {
    f.validate(graph.n());
    WeightedGraph out = graph;
    auto overlay = std::make_shared<WeightedGraph::Overlay>();
    if (graph.overlay_) *overlay = *graph.overlay_;
    if (f.all_sites || overlay->all) {
        overlay->all = true;
        overlay->vertices.clear();
        overlay->pairs.clear();
        graph.shared_->replacement();
        out.adj_ = graph.shared_->shadow;
        out.overlay_ = overlay;
        return out;
    }
    std::vector<std::pair<int, int>> toggled;
    for (const Site& s : f.items) {
        if (s.is_vertex()) {
            overlay->vertices.insert(s.u);
        } else {
            overlay->pairs.insert(pair_key(s.u, s.v));
            toggled.emplace_back(std::min(s.u, s.v), std::max(s.u, s.v));
        }
    }
    if (!toggled.empty()) {
        std::unordered_set<std::uint64_t> drop;
        std::vector<std::pair<int, int>> add;
        for (const auto& [a, b] : toggled) {
            const bool now = graph.has_edge(a, b);
            const bool want = graph.replacement_edge(a, b);
            if (now && !want) drop.insert(pair_key(a, b));
            if (!now && want) add.emplace_back(a, b);
        }
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : graph.adj_->edges())
            if (!drop.count(pair_key(e.first, e.second))) edges.push_back(e);
        edges.insert(edges.end(), add.begin(), add.end());
        out.adj_ = std::make_shared<const WeightedGraph::Csr>(WeightedGraph::Csr::build(graph.n(), std::move(edges)));
    }
    out.overlay_ = overlay;
    return out;
}

}  // namespace irg
