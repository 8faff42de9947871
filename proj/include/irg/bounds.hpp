#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "irg/weights.hpp"

namespace irg {

struct BoundParams {
    std::size_t n = 1;
    int ell = 1;
    double k_n = 1.0;
    MomentSummary m;                      // empirical Γ_{p,n}, κ_{p,n}, α_n, ϑ
    std::array<double, 4> gamma_limit{};  // Γ_p of ν, p = 0..3
    double tv_edge = 0.0;
    double tv_vertex = 0.0;
    double C = 1.0;
    double C0 = 1.0;

    // Moments of `weights`, α_n and Γ_p against `limit`, k_n = ⌈n^{1/3}⌉.
    static BoundParams from(const EmpiricalWeights& weights, const WeightSpec& limit, int ell);
    void validate() const;
    double n_theta() const { return static_cast<double>(n) * m.theta; }
};

// (|𝒱|, ‖𝒱‖, ‖𝒱‖₂, ‖𝒱‖₊) for a vertex set.
struct SetSummary {
    double card = 0.0;
    double norm1 = 0.0;
    double norm2 = 0.0;
    double norm_plus = 0.0;
};

SetSummary set_summary(const EmpiricalWeights& weights, const std::vector<int>& vertices);

double eta_bound(const BoundParams& p, const SetSummary& s);
double epsilon_v_bound(const BoundParams& p, const SetSummary& s);
// Same display as eta_bound, written out with the per-vertex sums.
double maincoup_bound(const BoundParams& p, const std::vector<double>& root_weights);

struct EpsRho {
    double epsilon = 0.0;
    double rho = 0.0;
};
EpsRho epsilon_rho_sequences(const BoundParams& p);
// ρ_{n,k}(𝒱) for a vertex set.
double rho_v_bound(const BoundParams& p, const SetSummary& s);

// Kolmogorov-distance bound; ε and ρ are evaluated at k = p.ell.
double clt_bound(const BoundParams& p, double sigma2, double me_delta_e, double mv_delta_v, double chi, double J);

// Stage bounds of the coupling pipeline.
// Neighbourhood vs intermediate tree, with the expectations replaced by the
// structural bounds below.
double blttl_bound(const BoundParams& p, double Wv);
// Repeated types across |𝒱| intermediate trees.
double repair_bound(const BoundParams& p, const SetSummary& s);
// Intermediate vs limit trees.
double treecoup_bound(const BoundParams& p, const SetSummary& s);

// Structural bounds on neighbourhoods (all with Γ_{p,n}).
namespace structural {
double mean_norm(const BoundParams& p, double Wv, int ell, int power);  // E‖S_ℓ(v)‖_p, power ∈ {0,1,2}
double mean_size(const BoundParams& p, double Wv, int ell);             // E|S_ℓ(v)|
double mean_weight(const BoundParams& p, double Wv, int ell);           // E‖S_ℓ(v)‖
double mean_excess(const BoundParams& p, double Wv, int ell);           // E‖S_ℓ(v)‖₊
double second_moment(const BoundParams& p, double Wv, int ell, int power);  // E‖S_ℓ(v)‖_p², power ∈ {0,1,2}
double degree_moment(const BoundParams& p, double Wv, int k);           // E|D_1(v)|^k
double path(const BoundParams& p, double normU, double normV, int ell);
double vertex_in_ball(const BoundParams& p, double Wu, double Wv, int ell);
double edge_in_ball(const BoundParams& p, double Wv, double Wu, double Wu2, int ell);
double not_tree(const BoundParams& p, double Wv, int ell);
// Expected node count of T_ℓ(W, ν): 1 + W(Γ₂+1)^ℓ with the limit Γ₂.
double limit_tree_size(const BoundParams& p, double W, int ell);
}  // namespace structural

}  // namespace irg
