#include "irg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "irg/bounds.hpp"
#include "irg/exploration.hpp"
#include "irg/stats.hpp"

namespace irg {

double ExperimentConfig::k_for(std::size_t n) const {
    if (k_n) return *k_n;
    return std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9);
}

void ExperimentConfig::validate() const {
    if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
    if (n_grid.empty()) throw std::invalid_argument("n grid must be nonempty");
    for (std::size_t n : n_grid)
        if (n < 1) throw std::invalid_argument("every n must be at least 1");
    if (ell_grid.empty()) throw std::invalid_argument("ell grid must be nonempty");
    for (int l : ell_grid)
        if (l < 0) throw std::invalid_argument("every ell must be nonnegative");
    if (k_n && !(*k_n > 0.0)) throw std::invalid_argument("k_n must be positive");
    if (roots < 1) throw std::invalid_argument("roots must be at least 1");
    if (!(C > 0.0) || !(C0 > 0.0)) throw std::invalid_argument("C and C0 must be positive");
    if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed = std::numeric_limits<std::size_t>::max();
    std::string message;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (i < failed) {
                    failed = i;
                    message = e.what();
                }
            }
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (failed != std::numeric_limits<std::size_t>::max()) throw ReplicaFailure(failed, message);
}

EmpiricalWeights experiment_weights(const ExperimentConfig& cfg, std::size_t n) {
    return sample_empirical_weights(cfg.weights, n, derive_seed(cfg.seed, 1, n));
}

Seed experiment_graph_seed(const ExperimentConfig& cfg, std::size_t n) { return derive_seed(cfg.seed, 2, n); }

double mark_tv_distance(const std::optional<WeightSpec>& a, const std::optional<WeightSpec>& b) {
    // an absent law is the point mass at zero
    auto atoms = [](const std::optional<WeightSpec>& s) -> std::optional<std::pair<std::vector<double>, std::vector<double>>> {
        if (!s) return std::make_pair(std::vector<double>{0.0}, std::vector<double>{1.0});
        if (!s->is_discrete()) return std::nullopt;
        return std::make_pair(s->values(), s->probs());
    };
    if (a == b) return 0.0;
    const auto da = atoms(a), db = atoms(b);
    if (!da || !db) return 1.0;  // coarse but valid
    double overlap = 0.0;
    for (std::size_t i = 0; i < da->first.size(); ++i)
        for (std::size_t j = 0; j < db->first.size(); ++j)
            if (da->first[i] == db->first[j]) overlap += std::min(da->second[i], db->second[j]);
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

namespace {

// Matching defaults to Exp(1) edge weights, edge sums to Exp(1) vertex weights.
MarkLaws application_marks(const ExperimentConfig& cfg) {
    MarkLaws m = cfg.marks;
    if (cfg.application == Application::matching && !m.edge) m.edge = WeightSpec::exponential(1.0);
    if (cfg.application == Application::edge_sum && !m.vertex) m.vertex = WeightSpec::exponential(1.0);
    return m;
}

std::vector<int> pick_distinct(Rng& rng, std::size_t n, std::size_t count) {
    if (count > n) throw std::invalid_argument("more roots than vertices");
    std::vector<int> out;
    while (out.size() < count) {
        const int v = static_cast<int>(rng.below(n));
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

BoundParams params_for(const ExperimentConfig& cfg, const EmpiricalWeights& w, std::size_t n, int ell) {
    BoundParams p = BoundParams::from(w, cfg.weights, ell);
    p.k_n = cfg.k_for(n);
    p.C = cfg.C;
    p.C0 = cfg.C0;
    p.tv_edge = mark_tv_distance(cfg.marks.edge, cfg.tree_marks().edge);
    p.tv_vertex = mark_tv_distance(cfg.marks.vertex, cfg.tree_marks().vertex);
    return p;
}

std::string num(double x) {
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string tag_cols(const RunTag& t) { return t.seed.hex() + "," + t.config_hash; }

}  // namespace

double application_value(Application app, const WeightedGraph& g) {
    return app == Application::edge_sum ? dependent_edge_sum(g) : max_weight_matching(g).value;
}

CltResult clt_experiment(const ExperimentConfig& cfg, unsigned workers) {
    cfg.validate();
    if (cfg.replicas < 2) throw std::invalid_argument("clt: need at least 2 replicas");
    const MarkLaws marks = application_marks(cfg);
    CltResult res;
    for (std::size_t n : cfg.n_grid) {
        if (cfg.application == Application::matching && n > static_cast<std::size_t>(exact_matching_limit))
            throw std::invalid_argument("clt: matching is exact only up to " + std::to_string(exact_matching_limit) +
                                        " vertices");
        const EmpiricalWeights w = experiment_weights(cfg, n);
        const Seed gs = experiment_graph_seed(cfg, n);
        const auto values = parallel_map<double>(cfg.replicas, workers, [&](std::size_t r) {
            return application_value(cfg.application, sample_graph(w, gs, r, marks));
        });
        CltRow row;
        row.n = n;
        row.replicas = cfg.replicas;
        const auto v = estimate_variance(values);
        row.mean = v.mean;
        row.sigma2 = v.variance;
        row.sigma2_se = v.jackknife_se;
        row.degenerate = !(v.variance > 1e-12 * std::max(1.0, v.mean * v.mean));
        row.ks_sd = ks_null_sd(cfg.replicas);
        if (row.degenerate) {
            row.ks = std::numeric_limits<double>::quiet_NaN();
            row.n_over_sigma2 = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.ks = ks_standardized(values).statistic;
            row.n_over_sigma2 = static_cast<double>(n) / v.variance;
        }
        res.rows.push_back(row);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        auto& row = res.rows[i];
        if (row.degenerate) {
            row.trend_ok = false;
            res.trend_ok = false;
            continue;
        }
        lo = std::min(lo, row.n_over_sigma2);
        hi = std::max(hi, row.n_over_sigma2);
        if (i > 0) {
            const auto& prev = res.rows[i - 1];
            row.trend_ok = !prev.degenerate && row.ks < prev.ks + 2.0 * row.ks_sd;
            res.trend_ok = res.trend_ok && row.trend_ok;
        }
    }
    res.ratio_spread = hi > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::quiet_NaN();
    return res;
}

CouplingRow coupling_point(const ExperimentConfig& cfg, std::size_t n, int ell, unsigned workers) {
    const EmpiricalWeights w = experiment_weights(cfg, n);
    const Seed gs = experiment_graph_seed(cfg, n);
    const CouplingContext ctx(w, cfg.weights);
    const BoundParams p = params_for(cfg, w, n, ell);
    CouplingConfig cc;
    cc.depth = ell;
    cc.k_n = cfg.k_for(n);
    cc.include_weights = true;

    struct One {
        bool broke = false;
        BreakReason reason = BreakReason::none;
        double bound = 0.0;
    };
    const auto results = parallel_map<One>(cfg.replicas, workers, [&](std::size_t r) {
        const WeightedGraph g = sample_graph(w, gs, r, cfg.marks);
        Rng pick(cfg.seed, r, SiteKind::experiment, {n, static_cast<std::uint64_t>(ell), 1});
        const auto roots = pick_distinct(pick, n, cfg.roots);
        const auto out = couple_full(g, ctx, roots, cc, cfg.tree_marks(), derive_seed(gs, 100 + static_cast<std::uint64_t>(ell), r));
        One o;
        for (const auto& c : out)
            if (!c.ok) {
                o.broke = true;
                if (o.reason == BreakReason::none) o.reason = c.break_reason;
            }
        o.bound = epsilon_v_bound(p, set_summary(w, roots));
        return o;
    });
    CouplingRow row;
    row.n = n;
    row.ell = ell;
    row.replicas = cfg.replicas;
    double bsum = 0.0;
    for (const auto& o : results) {
        if (o.broke) {
            ++row.breaks;
            ++row.reasons[static_cast<std::size_t>(o.reason)];
        }
        bsum += o.bound;
    }
    row.bound = bsum / static_cast<double>(cfg.replicas);
    const auto ci = binomial_ci(row.breaks, cfg.replicas, 3.0);
    row.rate = ci.rate;
    row.ci_lower = ci.lower;
    row.ci_upper = ci.upper;
    row.sigma = ci.sigma;
    row.violation = ci.lower > row.bound;
    return row;
}

std::vector<CouplingRow> coupling_experiment(const ExperimentConfig& cfg, unsigned workers) {
    cfg.validate();
    std::vector<CouplingRow> rows;
    for (std::size_t n : cfg.n_grid)
        for (int ell : cfg.ell_grid) rows.push_back(coupling_point(cfg, n, ell, workers));
    return rows;
}

std::vector<StructuralRow> structural_experiment(const ExperimentConfig& cfg, unsigned workers) {
    cfg.validate();
    static const char* names[] = {"size",      "weight",      "norm2",       "excess",      "deg1",
                                  "deg2",      "deg3",        "deg4",        "u_in_ball",   "not_tree",
                                  "size_sq",   "weight_sq"};
    constexpr std::size_t Q = std::size(names);
    std::vector<StructuralRow> rows;
    for (std::size_t n : cfg.n_grid) {
        if (n < 2) throw std::invalid_argument("structural: n must be at least 2");
        const EmpiricalWeights w = experiment_weights(cfg, n);
        const Seed gs = experiment_graph_seed(cfg, n);
        const double root = std::sqrt(static_cast<double>(n) * w.theta);
        for (int ell : cfg.ell_grid) {
            const BoundParams p = params_for(cfg, w, n, ell);
            using Pair = std::array<std::pair<double, double>, Q>;
            const auto res = parallel_map<Pair>(cfg.replicas, workers, [&](std::size_t r) {
                const WeightedGraph g = sample_graph(w, gs, r, cfg.marks);
                Rng pick(cfg.seed, r, SiteKind::experiment, {n, static_cast<std::uint64_t>(ell), 2});
                const auto uv = pick_distinct(pick, n, 2);
                const int v = uv[0], u = uv[1];
                const double Wv = w.W[static_cast<std::size_t>(v)], Wu = w.W[static_cast<std::size_t>(u)];
                const Neighbourhood nb = explore(g, v, ell);
                double size = 0.0, weight = 0.0, norm2 = 0.0, excess = 0.0;
                for (int x : nb.order) {
                    const double wx = w.W[static_cast<std::size_t>(x)];
                    size += 1.0;
                    weight += wx;
                    norm2 += wx * wx;
                    if (wx > root) excess += wx;
                }
                const double deg = static_cast<double>(g.degree(v));
                Pair out;
                out[0] = {size, structural::mean_size(p, Wv, ell)};
                out[1] = {weight, structural::mean_weight(p, Wv, ell)};
                out[2] = {norm2, structural::mean_norm(p, Wv, ell, 2)};
                out[3] = {excess, structural::mean_excess(p, Wv, ell)};
                for (int k = 1; k <= 4; ++k)
                    out[static_cast<std::size_t>(3 + k)] = {std::pow(deg, k), structural::degree_moment(p, Wv, k)};
                out[8] = {nb.contains(u) ? 1.0 : 0.0, ell == 0 ? 0.0 : structural::vertex_in_ball(p, Wu, Wv, ell)};
                out[9] = {is_tree(nb) ? 0.0 : 1.0, structural::not_tree(p, Wv, ell)};
                out[10] = {size * size, structural::second_moment(p, Wv, ell, 0)};
                out[11] = {weight * weight, structural::second_moment(p, Wv, ell, 1)};
                return out;
            });
            const double R = static_cast<double>(cfg.replicas);
            for (std::size_t q = 0; q < Q; ++q) {
                StructuralRow row;
                row.n = n;
                row.ell = ell;
                row.quantity = names[q];
                double sx = 0.0, sb = 0.0;
                for (const auto& a : res) {
                    sx += a[q].first;
                    sb += a[q].second;
                }
                row.mc_mean = sx / R;
                row.bound_mean = sb / R;
                double ss = 0.0;
                const double md = row.mc_mean - row.bound_mean;
                for (const auto& a : res) {
                    const double d = a[q].first - a[q].second - md;
                    ss += d * d;
                }
                row.slack_se = cfg.replicas > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
                row.ok = md <= 3.0 * row.slack_se;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::vector<BoundsRow> bounds_grid(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<BoundsRow> rows;
    for (std::size_t n : cfg.n_grid) {
        const EmpiricalWeights w = experiment_weights(cfg, n);
        for (int ell : cfg.ell_grid) {
            const BoundParams p = params_for(cfg, w, n, ell);
            // a typical single root, W_v = ϑ
            SetSummary s;
            s.card = 1.0;
            s.norm1 = w.theta;
            s.norm2 = w.theta * w.theta;
            s.norm_plus = w.theta > std::sqrt(p.n_theta()) ? w.theta : 0.0;
            const auto er = epsilon_rho_sequences(p);
            BoundsRow row;
            row.n = n;
            row.ell = ell;
            row.k_n = p.k_n;
            row.alpha_n = p.m.alpha_n;
            row.eta = eta_bound(p, s);
            row.epsilon_v = epsilon_v_bound(p, s);
            row.epsilon = er.epsilon;
            row.rho = er.rho;
            row.mean_weight = structural::mean_weight(p, w.theta, ell);
            row.not_tree = structural::not_tree(p, w.theta, ell);
            rows.push_back(row);
        }
    }
    return rows;
}

RdeResult rde_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    return rde_fixed_point(cfg.weights, cfg.pop_size, cfg.iterations, cfg.seed);
}

bool rde_envelope_ok(const RdeDiagnostics& d, double target) {
    if (d.gaps.empty()) return false;
    return rde_gaps_non_increasing(d) && d.gaps.back() < target;
}

std::vector<OracleRow> matching_oracle(const ExperimentConfig& cfg, unsigned workers) {
    cfg.validate();
    ExperimentConfig mc = cfg;
    mc.application = Application::matching;
    const MarkLaws marks = application_marks(mc);
    const std::size_t n = cfg.n_grid.front();
    if (n > static_cast<std::size_t>(exact_matching_limit))
        throw std::invalid_argument("matching-oracle: n must be at most " + std::to_string(exact_matching_limit));
    const int k = cfg.ell_grid.front();
    const EmpiricalWeights w = experiment_weights(cfg, n);
    const Seed gs = experiment_graph_seed(cfg, n);
    return parallel_map<OracleRow>(cfg.replicas, workers, [&](std::size_t r) {
        const WeightedGraph g = sample_graph(w, gs, r, marks);
        const auto el = WeightedEdgeList::of(g);
        OracleRow row;
        row.replica = r;
        row.edges = el.edges.size();
        row.value = max_weight_matching(el).value;
        const int v = 0;
        const auto minus_v = el.without({v});
        const double m_minus_v = max_weight_matching(minus_v).value;
        row.h_root = row.value - m_minus_v;
        double rec_m = m_minus_v, rec_h = 0.0;
        for (int u : g.neighbours(v)) {
            const double wvu = g.edge_weight(v, u);
            rec_m = std::max(rec_m, wvu + max_weight_matching(el.without({v, u})).value);
            rec_h = std::max(rec_h, wvu - h_value(minus_v, u));
        }
        // continuous weights: compare up to rounding of the subtractions
        const double tol = 1e-9 * std::max(1.0, row.value);
        row.recursion_ok = std::abs(rec_m - row.value) <= tol && std::abs(rec_h - row.h_root) <= tol;
        if (k >= 1) {
            const int kU = (k % 2 == 1) ? k : k - 1;
            const Neighbourhood nb = explore(g, v, kU);
            row.tree_shaped = is_tree(nb);
            if (row.tree_shaped) {
                const auto s = matching_sandwich(nb, g, k);
                row.gL = s.gL;
                row.gU = s.gU;
                const double tol = 1e-9 * std::max(1.0, row.value);
                row.sandwich_ok = s.gL <= row.h_root + tol && row.h_root <= s.gU + tol;
            }
        }
        return row;
    });
}

std::string clt_csv(const CltResult& r, const RunTag& tag) {
    std::ostringstream os;
    os << "n,sigma2,ks,n_over_sigma2,replicas,seed,config_hash,mean,sigma2_se,ks_null_sd,degenerate,trend_ok\n";
    for (const auto& row : r.rows)
        os << row.n << ',' << num(row.sigma2) << ',' << num(row.ks) << ',' << num(row.n_over_sigma2) << ','
           << row.replicas << ',' << tag_cols(tag) << ',' << num(row.mean) << ',' << num(row.sigma2_se) << ','
           << num(row.ks_sd) << ',' << (row.degenerate ? 1 : 0) << ',' << (row.trend_ok ? 1 : 0) << '\n';
    return os.str();
}

std::string coupling_csv(const std::vector<CouplingRow>& rows, const RunTag& tag) {
    std::ostringstream os;
    os << "n,ell,breaks,replicas,bound,rate,ci_lower,ci_upper,sigma,violation,seed,config_hash";
    for (int k = 1; k < break_reason_count; ++k) os << ",reason_" << to_string(static_cast<BreakReason>(k));
    os << '\n';
    for (const auto& row : rows) {
        os << row.n << ',' << row.ell << ',' << row.breaks << ',' << row.replicas << ',' << num(row.bound) << ','
           << num(row.rate) << ',' << num(row.ci_lower) << ',' << num(row.ci_upper) << ',' << num(row.sigma) << ','
           << (row.violation ? 1 : 0) << ',' << tag_cols(tag);
        for (int k = 1; k < break_reason_count; ++k) os << ',' << row.reasons[static_cast<std::size_t>(k)];
        os << '\n';
    }
    return os.str();
}

std::string structural_csv(const std::vector<StructuralRow>& rows, const RunTag& tag) {
    std::ostringstream os;
    os << "n,ell,quantity,mc_mean,bound_mean,slack_se,ok,seed,config_hash\n";
    for (const auto& row : rows)
        os << row.n << ',' << row.ell << ',' << row.quantity << ',' << num(row.mc_mean) << ','
           << num(row.bound_mean) << ',' << num(row.slack_se) << ',' << (row.ok ? 1 : 0) << ',' << tag_cols(tag)
           << '\n';
    return os.str();
}

std::string bounds_csv(const std::vector<BoundsRow>& rows, const RunTag& tag) {
    std::ostringstream os;
    os << "n,ell,k_n,alpha_n,eta,epsilon_v,epsilon,rho,mean_weight,not_tree,seed,config_hash\n";
    for (const auto& row : rows)
        os << row.n << ',' << row.ell << ',' << num(row.k_n) << ',' << num(row.alpha_n) << ',' << num(row.eta) << ','
           << num(row.epsilon_v) << ',' << num(row.epsilon) << ',' << num(row.rho) << ',' << num(row.mean_weight)
           << ',' << num(row.not_tree) << ',' << tag_cols(tag) << '\n';
    return os.str();
}

std::string rde_csv(const RdeResult& r, const RunTag& tag) {
    std::ostringstream os;
    os << "k,gap,gap_sd,noise,status,seed,config_hash\n";
    for (std::size_t k = 0; k < r.diagnostics.gaps.size(); ++k)
        os << k << ',' << num(r.diagnostics.gaps[k]) << ',' << num(r.diagnostics.gap_sd[k]) << ','
           << num(r.diagnostics.noise) << ','
           << to_string(r.diagnostics.status) << ',' << tag_cols(tag) << '\n';
    return os.str();
}

std::string oracle_csv(const std::vector<OracleRow>& rows, const RunTag& tag) {
    std::ostringstream os;
    os << "replica,edges,value,h_root,recursion_ok,tree_shaped,gL,gU,sandwich_ok,seed,config_hash\n";
    for (const auto& row : rows)
        os << row.replica << ',' << row.edges << ',' << num(row.value) << ',' << num(row.h_root) << ','
           << (row.recursion_ok ? 1 : 0) << ',' << (row.tree_shaped ? 1 : 0) << ',' << num(row.gL) << ','
           << num(row.gU) << ',' << (row.sandwich_ok ? 1 : 0) << ',' << tag_cols(tag) << '\n';
    return os.str();
}

}  // namespace irg
