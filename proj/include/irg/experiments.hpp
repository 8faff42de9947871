#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irg/applications.hpp"
#include "irg/coupling.hpp"
#include "irg/graph.hpp"
#include "irg/limit_trees.hpp"
#include "irg/rng.hpp"
#include "irg/weights.hpp"

namespace irg {

struct ExperimentConfig {
    WeightSpec weights = WeightSpec::constant(1.0);
    MarkLaws marks;                       // laws used to generate the graph
    std::optional<MarkLaws> limit_marks;  // laws on the tree side (default: marks)
    std::vector<std::size_t> n_grid{1000};
    std::vector<int> ell_grid{1};
    std::optional<double> k_n;  // fixed threshold; default ⌈n^{1/3}⌉
    std::size_t replicas = 1000;
    std::size_t roots = 1;
    Application application = Application::edge_sum;
    Seed seed;
    double C = 1.0;
    double C0 = 1.0;
    std::size_t pop_size = 100000;
    int iterations = 30;
    std::string out_dir = ".";

    double k_for(std::size_t n) const;
    const MarkLaws& tree_marks() const { return limit_marks ? *limit_marks : marks; }
    void validate() const;
};

// Raised when a replica throws; carries the replica index.
class ReplicaFailure : public std::runtime_error {
public:
    ReplicaFailure(std::size_t replica, const std::string& what)
        : std::runtime_error("replica " + std::to_string(replica) + ": " + what), replica_(replica) {}
    std::size_t replica() const { return replica_; }

private:
    std::size_t replica_;
};

// Runs body(i) for i in [0, count) on `workers` threads. Results are stored
// by index, so the outcome never depends on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& body);

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned workers, const std::function<T(std::size_t)>& body) {
    std::vector<T> out(count);
    parallel_for(count, workers, [&](std::size_t i) { out[i] = body(i); });
    return out;
}

// Frozen per-n weight vector used by every experiment.
EmpiricalWeights experiment_weights(const ExperimentConfig& cfg, std::size_t n);
// Base seed of the replica graphs at size n.
Seed experiment_graph_seed(const ExperimentConfig& cfg, std::size_t n);

// Total variation distance between two (possibly absent) mark laws.
double mark_tv_distance(const std::optional<WeightSpec>& a, const std::optional<WeightSpec>& b);

// ---- CLT ----

double application_value(Application app, const WeightedGraph& g);

struct CltRow {
    std::size_t n = 0;
    std::size_t replicas = 0;
    double mean = 0.0;
    double sigma2 = 0.0;
    double sigma2_se = 0.0;
    bool degenerate = false;
    double ks = 0.0;     // NaN when degenerate
    double ks_sd = 0.0;  // null standard deviation of the statistic
    double n_over_sigma2 = 0.0;
    bool trend_ok = true;  // ks below previous ks + 2 ks_sd
};

struct CltResult {
    std::vector<CltRow> rows;
    bool trend_ok = true;
    double ratio_spread = 0.0;  // max/min − 1 of n/σ̂²
};

CltResult clt_experiment(const ExperimentConfig& cfg, unsigned workers);

// ---- coupling ----

struct CouplingRow {
    std::size_t n = 0;
    int ell = 0;
    std::size_t replicas = 0;
    std::uint64_t breaks = 0;
    double rate = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    double sigma = 0.0;
    double bound = 0.0;  // mean over replicas of ε_{n,ℓ}(𝒱)
    bool violation = false;
    std::array<std::uint64_t, break_reason_count> reasons{};  // first break reason per replica
};

CouplingRow coupling_point(const ExperimentConfig& cfg, std::size_t n, int ell, unsigned workers);
std::vector<CouplingRow> coupling_experiment(const ExperimentConfig& cfg, unsigned workers);

// ---- structural battery ----

struct StructuralRow {
    std::size_t n = 0;
    int ell = 0;
    std::string quantity;
    double mc_mean = 0.0;
    double bound_mean = 0.0;
    double slack_se = 0.0;  // standard error of (value − bound)
    bool ok = true;         // mean(value − bound) ≤ 3 se
};

std::vector<StructuralRow> structural_experiment(const ExperimentConfig& cfg, unsigned workers);

// ---- bounds grid ----

struct BoundsRow {
    std::size_t n = 0;
    int ell = 0;
    double k_n = 0.0;
    double alpha_n = 0.0;
    double eta = 0.0;
    double epsilon_v = 0.0;
    double epsilon = 0.0;
    double rho = 0.0;
    double mean_weight = 0.0;
    double not_tree = 0.0;
};

std::vector<BoundsRow> bounds_grid(const ExperimentConfig& cfg);

// ---- RDE ----

RdeResult rde_experiment(const ExperimentConfig& cfg);
// Gaps non-increasing within the 2σ band and final gap below `target`.
bool rde_envelope_ok(const RdeDiagnostics& d, double target);

// ---- matching oracle ----

struct OracleRow {
    std::size_t replica = 0;
    std::size_t edges = 0;
    double value = 0.0;
    double h_root = 0.0;
    bool recursion_ok = true;
    bool tree_shaped = false;
    double gL = 0.0;
    double gU = 0.0;
    bool sandwich_ok = true;
};

std::vector<OracleRow> matching_oracle(const ExperimentConfig& cfg, unsigned workers);

// ---- CSV output ----

struct RunTag {
    Seed seed;
    std::string config_hash;
};

std::string clt_csv(const CltResult& r, const RunTag& tag);
std::string coupling_csv(const std::vector<CouplingRow>& rows, const RunTag& tag);
std::string structural_csv(const std::vector<StructuralRow>& rows, const RunTag& tag);
std::string bounds_csv(const std::vector<BoundsRow>& rows, const RunTag& tag);
std::string rde_csv(const RdeResult& r, const RunTag& tag);
std::string oracle_csv(const std::vector<OracleRow>& rows, const RunTag& tag);

}  // namespace irg
