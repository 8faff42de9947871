#include "irg/limit_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irg/distributions.hpp"

namespace irg {

TypeSampler::TypeSampler(const EmpiricalWeights& weights) {
    weights.validate();
    cum_.resize(weights.n);
    std::partial_sum(weights.W.begin(), weights.W.end(), cum_.begin());
    scale_ = static_cast<double>(weights.n) * weights.theta;
}

int TypeSampler::draw(Rng& rng) const {
    const double x = rng.uniform() * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), x);
    if (it == cum_.end()) --it;
    return static_cast<int>(it - cum_.begin());
}

namespace {

double draw_mark(const std::optional<WeightSpec>& law, Rng& rng) { return law ? law->sample(rng) : 0.0; }

void check_budget(const RootedWeightedTree& t, std::size_t cap) {
    if (t.size() > cap) throw NodeBudgetExceeded("tree node budget of " + std::to_string(cap) + " nodes exceeded");
}

}  // namespace

void grow_intermediate(RootedWeightedTree& t, int node, int max_depth, const EmpiricalWeights& weights,
                       const TypeSampler& types, Rng& rng, std::size_t node_cap) {
    std::vector<int> queue{node};
    std::vector<int> kids;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const int x = queue[i];
        if (t.nodes[static_cast<std::size_t>(x)].depth >= max_depth) continue;
        const int count = sample_poisson(rng, types.offspring_mean(t.nodes[static_cast<std::size_t>(x)].type));
        kids.clear();
        for (int c = 0; c < count; ++c) kids.push_back(types.draw(rng));
        std::sort(kids.begin(), kids.end());
        for (int k : kids) queue.push_back(t.add_child(x, weights.W[static_cast<std::size_t>(k)], 0.0, 0.0, k));
        check_budget(t, node_cap);
    }
}

void grow_limit(RootedWeightedTree& t, int node, int max_depth, const WeightSpec& biased, const MarkLaws& marks,
                Rng& rng, std::size_t node_cap) {
    std::vector<int> queue{node};
    std::vector<double> kids;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const int x = queue[i];
        if (t.nodes[static_cast<std::size_t>(x)].depth >= max_depth) continue;
        const int count = sample_poisson(rng, t.nodes[static_cast<std::size_t>(x)].type);
        kids.clear();
        for (int c = 0; c < count; ++c) kids.push_back(biased.sample(rng));
        std::sort(kids.begin(), kids.end());
        for (double w : kids) {
            const double vw = draw_mark(marks.vertex, rng);
            const double ew = draw_mark(marks.edge, rng);
            queue.push_back(t.add_child(x, w, vw, ew));
        }
        check_budget(t, node_cap);
    }
}

RootedWeightedTree sample_limit_tree(double W, const WeightSpec& spec, const MarkLaws& marks, int depth,
                                     const Seed& seed, std::size_t node_cap) {
    if (depth < 0) throw std::invalid_argument("sample_limit_tree: negative depth");
    if (!(W > 0.0)) throw std::invalid_argument("sample_limit_tree: root type must be positive");
    Rng rng(seed, 0, SiteKind::limit, {});
    RootedWeightedTree t = RootedWeightedTree::root_only(W, draw_mark(marks.vertex, rng));
    grow_limit(t, 0, depth, spec.size_biased(), marks, rng, node_cap);
    return t;
}

RootedWeightedTree sample_intermediate_tree(const EmpiricalWeights& weights, const TypeSampler& types, int v,
                                            int depth, const Seed& seed, std::size_t node_cap) {
    if (depth < 0) throw std::invalid_argument("sample_intermediate_tree: negative depth");
    if (v < 0 || static_cast<std::size_t>(v) >= weights.n) throw std::out_of_range("sample_intermediate_tree: bad root");
    Rng rng(seed, 0, SiteKind::tree, {static_cast<std::uint64_t>(v)});
    RootedWeightedTree t = RootedWeightedTree::root_only(weights.W[static_cast<std::size_t>(v)], 0.0, v);
    grow_intermediate(t, 0, depth, weights, types, rng, node_cap);
    return t;
}

RootedWeightedTree sample_intermediate_tree(const EmpiricalWeights& weights, int v, int depth, const Seed& seed,
                                            std::size_t node_cap) {
    return sample_intermediate_tree(weights, TypeSampler(weights), v, depth, seed, node_cap);
}

RootedWeightedTree graft(const RootedWeightedTree& t, const RootedWeightedTree& t2, double w, int depth) {
    if (t.nodes.empty() || t2.nodes.empty()) throw std::invalid_argument("graft: empty tree");
    if (depth < 1 || t.height() > depth || t2.height() > depth - 1)
        throw std::invalid_argument("graft: depth mismatch");
    RootedWeightedTree out = t;
    const auto order = t2.bfs_order();
    std::vector<int> remap(t2.nodes.size(), -1);
    for (int old : order) {
        const TreeNode& n = t2.nodes[static_cast<std::size_t>(old)];
        const int parent = n.parent < 0 ? 0 : remap[static_cast<std::size_t>(n.parent)];
        const double ew = n.parent < 0 ? w : n.edge_weight;
        remap[static_cast<std::size_t>(old)] = out.add_child(parent, n.type, n.vertex_weight, ew, n.source);
    }
    return out;
}

Population rde_apply(const Population& pop, const WeightSpec& spec, const Seed& seed) {
    if (pop.particles.empty()) throw std::invalid_argument("rde_apply: empty population");
    const WeightSpec biased = spec.size_biased();
    const std::size_t m = pop.particles.size();
    Population out;
    out.particles.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        Rng rng(seed, 0, SiteKind::rde, {i});
        const int count = sample_poisson(rng, biased.sample(rng));
        double best = 0.0;
        for (int c = 0; c < count; ++c) {
            const double xi = sample_exponential(rng);
            const double x = pop.particles[rng.below(m)];
            best = std::max(best, xi - x);
        }
        out.particles[i] = best;
    }
    return out;
}

Seed rde_iteration_seed(const Seed& seed, int t) { return derive_seed(seed, 0x5244452d, static_cast<std::uint64_t>(t)); }

double population_wasserstein(const Population& a, const Population& b) {
    if (a.size() != b.size() || a.size() == 0) throw std::invalid_argument("population_wasserstein: size mismatch");
    std::vector<double> x = a.particles, y = b.particles;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] - y[i]);
    return acc / static_cast<double>(x.size());
}

namespace {

struct Chain {
    Population even, odd;
    std::vector<double> gaps;
};

Chain run_chain(const WeightSpec& spec, std::size_t pop_size, int iterations, const Seed& seed) {
    Chain c;
    // One frozen random map: T^{2k}δ0 rises and T^{2k+1}δ0 falls particlewise.
    const Seed frozen = rde_iteration_seed(seed, 0);
    Population current{std::vector<double>(pop_size, 0.0)};
    for (int k = 0; k < iterations; ++k) {
        Population odd = rde_apply(current, spec, frozen);
        c.gaps.push_back(population_wasserstein(current, odd));
        c.even = std::move(current);
        c.odd = odd;
        if (k + 1 < iterations) current = rde_apply(odd, spec, frozen);
    }
    return c;
}

}  // namespace

Seed rde_chain_seed(const Seed& seed, int chain) {
    return chain == 0 ? seed : derive_seed(seed, 0x52444543, static_cast<std::uint64_t>(chain));
}

RdeResult rde_fixed_point(const WeightSpec& spec, std::size_t pop_size, int iterations, const Seed& seed, int chains) {
    if (pop_size < 1000) throw std::invalid_argument("rde_fixed_point: population size must be at least 1000");
    if (iterations < 1) throw std::invalid_argument("rde_fixed_point: need at least one iteration");
    if (chains < 2) throw std::invalid_argument("rde_fixed_point: need at least two chains");
    std::vector<Chain> runs;
    for (int c = 0; c < chains; ++c) runs.push_back(run_chain(spec, pop_size, iterations, rde_chain_seed(seed, c)));

    RdeResult r;
    auto& d = r.diagnostics;
    d.gaps = runs[0].gaps;
    d.gap_sd.assign(static_cast<std::size_t>(iterations), 0.0);
    double floor_sum = 0.0;
    for (int k = 0; k < iterations; ++k) {
        double m = 0.0, q = 0.0;
        for (const auto& c : runs) m += c.gaps[static_cast<std::size_t>(k)];
        m /= chains;
        for (const auto& c : runs) q += (c.gaps[static_cast<std::size_t>(k)] - m) * (c.gaps[static_cast<std::size_t>(k)] - m);
        d.gap_sd[static_cast<std::size_t>(k)] = std::sqrt(q / (chains - 1));
    }
    // Floor: W1 between independent full-size samples of (nearly) the same law,
    // taken across chains at the last even iterate.
    for (int c = 1; c < chains; ++c) floor_sum += population_wasserstein(runs[0].even, runs[static_cast<std::size_t>(c)].even);
    d.noise = floor_sum / (chains - 1);
    r.even = std::move(runs[0].even);
    r.odd = std::move(runs[0].odd);

    const auto& g = d.gaps;
    const double last = g.back();
    const double band = 2.0 * d.gap_sd.back();
    if (last <= d.noise + band) {
        d.status = RdeDiagnostics::Status::converged;
    } else if (g.size() >= 6 && last >= g[g.size() - 6] - band) {
        d.status = RdeDiagnostics::Status::stalled;
    } else {
        d.status = RdeDiagnostics::Status::running;
    }
    return r;
}

bool rde_gaps_non_increasing(const RdeDiagnostics& d) {
    for (std::size_t k = 1; k < d.gaps.size(); ++k) {
        const double sd = std::hypot(d.gap_sd[k], d.gap_sd[k - 1]);
        if (d.gaps[k] > d.gaps[k - 1] + 2.0 * sd) return false;
    }
    return true;
}

const char* to_string(RdeDiagnostics::Status s) {
    switch (s) {
        case RdeDiagnostics::Status::converged: return "converged";
        case RdeDiagnostics::Status::stalled: return "stalled";
        case RdeDiagnostics::Status::running: return "running";
    }
    return "unknown";
}

}  // namespace irg
