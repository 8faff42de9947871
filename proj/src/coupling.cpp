#include "irg/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "irg/distributions.hpp"

namespace irg {

const char* to_string(BreakReason r) {
    switch (r) {
        case BreakReason::none: return "none";
        case BreakReason::x_neq_z: return "XneqZ";
        case BreakReason::active_collision: return "ActiveCollision";
        case BreakReason::completed_collision: return "CompletedCollision";
        case BreakReason::size_overflow: return "SizeOverflow";
        case BreakReason::type_repeat: return "TypeRepeat";
        case BreakReason::wasserstein_redraw: return "WassersteinRedraw";
        case BreakReason::weight_mismatch: return "WeightMismatch";
    }
    return "unknown";
}

CouplingConfig CouplingConfig::standard(std::size_t n, int depth) {
    CouplingConfig c;
    c.k_n = std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9);
    c.depth = depth;
    return c;
}

void CouplingConfig::validate() const {
    if (!(k_n > 0.0)) throw std::invalid_argument("CouplingConfig: k_n must be positive");
    if (depth < 0) throw std::invalid_argument("CouplingConfig: negative depth");
}

void CouplingOutcome::record_break(BreakReason reason, int level) {
    stage_flags |= 1u << static_cast<unsigned>(reason);
    if (ok) {
        ok = false;
        break_level = level;
        break_reason = reason;
    }
}

BernoulliPoisson couple_bernoulli_poisson(double p_prime, double u) {
    if (!(p_prime >= 0.0)) throw std::domain_error("couple_bernoulli_poisson: p' must be nonnegative");
    const double pe = std::min(p_prime, 1.0);
    return {u <= pe ? 1 : 0, poisson_quantile(p_prime, 1.0 - u)};
}

BernoulliPoisson couple_bernoulli_poisson(double p_prime, const Seed& seed, std::uint64_t site) {
    return couple_bernoulli_poisson(p_prime, to_unit(site_key(seed, 0, SiteKind::coupling, {site})));
}

CouplingContext::CouplingContext(const EmpiricalWeights& weights, const WeightSpec& limit)
    : weights_(weights), types_(weights), limit_(limit), limit_biased_(limit.size_biased()) {
    const DiscreteMeasure m = size_biased_measure(weights_);
    atoms_ = m.values;
    double acc = 0.0;
    for (double p : m.probs) cum_.push_back(acc += p);
    cum_.back() = 1.0;
}

std::pair<double, double> CouplingContext::biased_atom(double w) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), w);
    if (it == atoms_.end() || *it != w) throw std::invalid_argument("biased_atom: value is not an empirical weight");
    const auto i = static_cast<std::size_t>(it - atoms_.begin());
    return {i == 0 ? 0.0 : cum_[i - 1], cum_[i]};
}

namespace {

enum class Status : std::uint8_t { active, completed };

}  // namespace

CouplingOutcome couple_neighbourhood_to_intermediate(const WeightedGraph& graph, const TypeSampler& types, int v,
                                                     const CouplingConfig& cfg, const Seed& seed) {
    cfg.validate();
    const auto& weights = graph.weights();
    const auto& W = weights.W;
    const double scale = static_cast<double>(weights.n) * weights.theta;

    CouplingOutcome out;
    out.root = v;
    out.depth = cfg.depth;
    out.neighbourhood = explore(graph, v, cfg.depth);

    Rng rng(seed, graph.stream(), SiteKind::coupling, {static_cast<std::uint64_t>(v)});
    RootedWeightedTree& t = out.tree;
    t = RootedWeightedTree::root_only(W[static_cast<std::size_t>(v)], 0.0, v);

    std::unordered_map<int, Status> status{{v, Status::active}};
    std::vector<int> completed;
    bool coupled = true;
    double norm = W[static_cast<std::size_t>(v)];
    int level = 0;
    if (norm > cfg.k_n) {
        out.record_break(BreakReason::size_overflow, 0);
        coupled = false;
    }

    std::vector<int> kids;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const int d = t.nodes[i].depth;
        if (coupled && d > level) {
            // All of level d-1 is processed, so every vertex of S_d is known.
            level = d;
            if (norm > cfg.k_n) {
                out.record_break(BreakReason::size_overflow, d);
                coupled = false;
            }
        }
        if (d >= cfg.depth) break;
        if (!coupled) {
            const int count = sample_poisson(rng, types.offspring_mean(t.nodes[i].type));
            kids.clear();
            for (int c = 0; c < count; ++c) kids.push_back(types.draw(rng));
            std::sort(kids.begin(), kids.end());
            for (int k : kids) t.add_child(static_cast<int>(i), W[static_cast<std::size_t>(k)], 0.0, 0.0, k);
            continue;
        }

        const int vj = static_cast<int>(t.nodes[i].source);
        const double wj = W[static_cast<std::size_t>(vj)];
        bool x_neq_z = false, into_active = false, into_completed = false;
        kids.clear();
        // Exploration-relevant neighbours: X = 1, Z from the conditional law.
        for (int u : graph.neighbours(vj)) {
            auto it = status.find(u);
            if (it != status.end() && it->second == Status::completed) continue;
            const double pp = wj * W[static_cast<std::size_t>(u)] / scale;
            const double pe = std::min(pp, 1.0);
            const int z = couple_bernoulli_poisson(pp, pe * rng.uniform()).z;
            if (z != 1) x_neq_z = true;
            if (z > 0 && it != status.end()) into_active = true;
            for (int c = 0; c < z; ++c) kids.push_back(u);
        }
        // Non-neighbours in U ∪ A carry X = 0 and hence Z = 0. The own type
        // has no edge variable and gets an independent Poisson count.
        if (const int z = sample_poisson(rng, wj * wj / scale); z > 0) {
            into_active = true;
            for (int c = 0; c < z; ++c) kids.push_back(vj);
        }
        // Completed vertices: independent Z* counts.
        for (int u : completed) {
            const int z = sample_poisson(rng, wj * W[static_cast<std::size_t>(u)] / scale);
            if (z > 0) {
                into_completed = true;
                for (int c = 0; c < z; ++c) kids.push_back(u);
            }
        }
        // Children are relabelled uniformly and then reordered by type, which
        // matches the label order of the newly discovered vertices.
        std::shuffle(kids.begin(), kids.end(), rng);
        std::stable_sort(kids.begin(), kids.end());
        for (int k : kids) {
            t.add_child(static_cast<int>(i), W[static_cast<std::size_t>(k)], 0.0, 0.0, k);
            if (!status.count(k)) {
                status.emplace(k, Status::active);
                norm += W[static_cast<std::size_t>(k)];
            }
        }
        status[vj] = Status::completed;
        completed.push_back(vj);

        if (x_neq_z) out.record_break(BreakReason::x_neq_z, d + 1);
        else if (into_active) out.record_break(BreakReason::active_collision, d + 1);
        else if (into_completed) out.record_break(BreakReason::completed_collision, d + 1);
        if (!out.ok) coupled = false;
    }
    // An edge inside D_ℓ closes a cycle the tree cannot have.
    if (coupled)
        for (const auto& e : out.neighbourhood.edges)
            if (e.level == cfg.depth) {
                out.record_break(BreakReason::active_collision, cfg.depth);
                break;
            }
    return out;
}

CouplingOutcome couple_neighbourhood_to_intermediate(const WeightedGraph& graph, int v, const CouplingConfig& cfg,
                                                     const Seed& seed) {
    return couple_neighbourhood_to_intermediate(graph, TypeSampler(graph.weights()), v, cfg, seed);
}

std::vector<CouplingOutcome> repair_independence(std::vector<CouplingOutcome> outcomes,
                                                 const EmpiricalWeights& weights, const TypeSampler& types,
                                                 const Seed& seed) {
    if (outcomes.size() <= 1) return outcomes;
    {
        std::vector<int> roots;
        for (const auto& o : outcomes) roots.push_back(o.root);
        std::sort(roots.begin(), roots.end());
        if (std::adjacent_find(roots.begin(), roots.end()) != roots.end())
            throw std::invalid_argument("repair_independence: roots must be distinct");
    }
    const std::size_t m = outcomes.size();
    std::vector<std::vector<int>> order(m);
    std::vector<std::vector<char>> replace(m), dropped(m);
    int max_depth = 0;
    for (std::size_t k = 0; k < m; ++k) {
        order[k] = outcomes[k].tree.bfs_order();
        replace[k].assign(outcomes[k].tree.size(), 0);
        dropped[k].assign(outcomes[k].tree.size(), 0);
        max_depth = std::max(max_depth, outcomes[k].tree.height());
    }
    // first tree in which each type occurred
    std::unordered_map<std::int64_t, std::size_t> seen;
    std::vector<std::size_t> cursor(m, 0);
    for (int r = 0; r <= max_depth; ++r) {
        for (std::size_t k = 0; k < m; ++k) {
            auto& t = outcomes[k].tree;
            for (; cursor[k] < order[k].size(); ++cursor[k]) {
                const int x = order[k][cursor[k]];
                const TreeNode& node = t.nodes[static_cast<std::size_t>(x)];
                if (node.depth != r) break;
                if (node.parent >= 0) {
                    const auto p = static_cast<std::size_t>(node.parent);
                    if (replace[k][p] || dropped[k][p]) {
                        dropped[k][static_cast<std::size_t>(x)] = 1;
                        continue;
                    }
                }
                auto [it, fresh] = seen.emplace(node.source, k);
                if (!fresh && it->second != k) {
                    replace[k][static_cast<std::size_t>(x)] = 1;
                    outcomes[k].record_break(BreakReason::type_repeat, r);
                }
            }
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (!outcomes[k].has(BreakReason::type_repeat)) continue;
        const auto& old = outcomes[k].tree;
        const int depth = outcomes[k].depth;
        Rng rng(seed, 0, SiteKind::repair, {k});
        RootedWeightedTree t;
        std::vector<int> remap(old.size(), -1);
        std::vector<int> regrow;
        for (int x : order[k]) {
            const auto xi = static_cast<std::size_t>(x);
            if (dropped[k][xi]) continue;
            const TreeNode& n = old.nodes[xi];
            if (n.parent < 0) t = RootedWeightedTree::root_only(n.type, n.vertex_weight, n.source);
            else remap[xi] = t.add_child(remap[static_cast<std::size_t>(n.parent)], n.type, n.vertex_weight,
                                         n.edge_weight, n.source);
            if (n.parent < 0) remap[xi] = 0;
            if (replace[k][xi]) regrow.push_back(remap[xi]);
        }
        for (int x : regrow) grow_intermediate(t, x, depth, weights, types, rng);
        outcomes[k].tree = std::move(t);
    }
    return outcomes;
}

std::vector<CouplingOutcome> repair_independence(std::vector<CouplingOutcome> outcomes,
                                                 const EmpiricalWeights& weights, const Seed& seed) {
    return repair_independence(std::move(outcomes), weights, TypeSampler(weights), seed);
}

LimitCoupling couple_intermediate_to_limit(const RootedWeightedTree& tree, const CouplingContext& ctx, int depth,
                                           const Seed& seed) {
    if (tree.nodes.empty()) throw std::invalid_argument("couple_intermediate_to_limit: empty tree");
    LimitCoupling out;
    const TreeNode& root = tree.nodes[0];
    Rng rng(seed, 0, SiteKind::limit, {static_cast<std::uint64_t>(root.source)});
    out.tree = RootedWeightedTree::root_only(root.type, 0.0, root.source);
    const MarkLaws no_marks;

    // (intermediate node, limit node) pairs still coupled
    std::vector<std::pair<int, int>> queue{{0, 0}};
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const auto [x, y] = queue[q];
        const TreeNode& src = tree.nodes[static_cast<std::size_t>(x)];
        if (src.depth >= depth) continue;
        const int observed = static_cast<int>(src.children.size());
        const double mean_n = ctx.types().offspring_mean(src.type);
        const double mean = out.tree.nodes[static_cast<std::size_t>(y)].type;
        const auto [lo, hi] = poisson_cdf_interval(mean_n, observed);
        const int count = poisson_quantile(mean, lo + (hi - lo) * rng.uniform());
        if (count != observed) {
            if (out.ok) {
                out.ok = false;
                out.break_level = src.depth + 1;
                out.reason = BreakReason::wasserstein_redraw;
            }
            for (int c = 0; c < count; ++c) {
                const int child = out.tree.add_child(y, ctx.limit_biased().sample(rng), 0.0, 0.0);
                grow_limit(out.tree, child, depth, ctx.limit_biased(), no_marks, rng);
            }
            continue;
        }
        for (int c : src.children) {
            const auto [alo, ahi] = ctx.biased_atom(tree.nodes[static_cast<std::size_t>(c)].type);
            const double w = ctx.limit_biased().quantile(alo + (ahi - alo) * rng.uniform());
            queue.emplace_back(c, out.tree.add_child(y, w, 0.0, 0.0));
        }
    }
    return out;
}

LimitCoupling couple_intermediate_to_limit(const RootedWeightedTree& tree, const EmpiricalWeights& weights,
                                           const WeightSpec& spec, int depth, const Seed& seed) {
    return couple_intermediate_to_limit(tree, CouplingContext(weights, spec), depth, seed);
}

double tv_couple_mark(const std::optional<WeightSpec>& from, const std::optional<WeightSpec>& to, double x, Rng& rng) {
    if (!to) return 0.0;
    if (!from || from->is_discrete() != to->is_discrete()) return to->sample(rng);
    if (*from == *to) return x;
    const double f = from->density(x);
    const double g = to->density(x);
    if (f > 0.0 && rng.uniform() * f <= g) return x;
    // Draw from the normalized excess (g - f)_+ by rejection from g.
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
        const double y = to->sample(rng);
        const double gy = to->density(y);
        const double fy = from->density(y);
        if (gy > 0.0 && rng.uniform() * gy < gy - fy) return y;
    }
    throw std::runtime_error("tv_couple_mark: rejection sampler did not terminate");
}

std::vector<CouplingOutcome> couple_full(const WeightedGraph& graph, const CouplingContext& ctx,
                                         const std::vector<int>& roots, const CouplingConfig& cfg,
                                         const MarkLaws& limit_marks, const Seed& seed) {
    std::vector<CouplingOutcome> outcomes;
    outcomes.reserve(roots.size());
    for (std::size_t k = 0; k < roots.size(); ++k)
        outcomes.push_back(couple_neighbourhood_to_intermediate(graph, ctx.types(), roots[k], cfg, derive_seed(seed, 1, k)));
    outcomes = repair_independence(std::move(outcomes), graph.weights(), ctx.types(), derive_seed(seed, 2, 0));

    const MarkLaws& graph_marks = graph.marks();
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        CouplingOutcome& o = outcomes[k];
        LimitCoupling lc = couple_intermediate_to_limit(o.tree, ctx, cfg.depth, derive_seed(seed, 3, k));
        if (!lc.ok) o.record_break(lc.reason, *lc.break_level);
        o.tree = std::move(lc.tree);

        if (!cfg.include_weights) continue;
        Rng rng(derive_seed(seed, 4, k), 0, SiteKind::overlay, {});
        const auto& nb = o.neighbourhood;
        auto& nodes = o.tree.nodes;
        if (o.ok && is_tree(nb) && nb.size() == nodes.size()) {
            // Both sides enumerate vertices in the same breadth-first order.
            bool mismatch = false;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const int g = nb.order[i];
                const double xv = graph.vertex_weight(g);
                nodes[i].vertex_weight = tv_couple_mark(graph_marks.vertex, limit_marks.vertex, xv, rng);
                mismatch |= nodes[i].vertex_weight != xv;
                if (i > 0) {
                    const double xe = graph.edge_weight(nb.order[static_cast<std::size_t>(nb.parent[i])], g);
                    nodes[i].edge_weight = tv_couple_mark(graph_marks.edge, limit_marks.edge, xe, rng);
                    mismatch |= nodes[i].edge_weight != xe;
                }
            }
            if (mismatch) o.record_break(BreakReason::weight_mismatch, 0);
        } else {
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                nodes[i].vertex_weight = limit_marks.vertex ? limit_marks.vertex->sample(rng) : 0.0;
                nodes[i].edge_weight = (i > 0 && limit_marks.edge) ? limit_marks.edge->sample(rng) : 0.0;
            }
        }
    }
    return outcomes;
}

std::vector<CouplingOutcome> couple_full(const WeightedGraph& graph, const std::vector<int>& roots,
                                         const CouplingConfig& cfg, const WeightSpec& spec,
                                         const MarkLaws& limit_marks, const Seed& seed) {
    return couple_full(graph, CouplingContext(graph.weights(), spec), roots, cfg, limit_marks, seed);
}

}  // namespace irg
