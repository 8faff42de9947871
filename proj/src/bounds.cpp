#include "irg/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irg {

BoundParams BoundParams::from(const EmpiricalWeights& weights, const WeightSpec& limit, int ell) {
    BoundParams p;
    p.n = weights.n;
    p.ell = ell;
    p.k_n = std::ceil(std::cbrt(static_cast<double>(weights.n)) - 1e-9);
    p.m = moments(weights, limit);
    for (int q = 0; q < 4; ++q) p.gamma_limit[static_cast<std::size_t>(q)] = limit.gamma_p(q);
    return p;
}

void BoundParams::validate() const {
    if (n == 0 || !(m.theta > 0.0) || !(k_n > 0.0)) throw std::invalid_argument("BoundParams: n, theta and k_n must be positive");
    if (!(C > 0.0) || !(C0 > 0.0)) throw std::invalid_argument("BoundParams: constants must be positive");
    if (!(m.gamma[1] > 0.0)) throw std::invalid_argument("BoundParams: Gamma_1 must be positive");
}

SetSummary set_summary(const EmpiricalWeights& weights, const std::vector<int>& vertices) {
    SetSummary s;
    const double root = std::sqrt(static_cast<double>(weights.n) * weights.theta);
    for (int v : vertices) {
        const double w = weights.W.at(static_cast<std::size_t>(v));
        s.card += 1.0;
        s.norm1 += w;
        s.norm2 += w * w;
        if (w > root) s.norm_plus += w;
    }
    return s;
}

namespace {

struct Sym {
    double nt, g1, g2, g3, k1, k2, a, kn, theta, G2;
};

Sym symbols(const BoundParams& p) {
    p.validate();
    return {p.n_theta(), p.m.gamma[1], p.m.gamma[2], p.m.gamma[3], p.m.kappa[1], p.m.kappa[2],
            p.m.alpha_n, p.k_n, p.m.theta, p.gamma_limit[2]};
}

}  // namespace

double eta_bound(const BoundParams& p, const SetSummary& s) {
    const Sym y = symbols(p);
    const int l = p.ell;
    return s.norm2 * y.g2 / y.nt + s.norm_plus * y.g1 +
           s.norm1 * std::pow(y.g2 + 1.0, l) *
               (y.g3 / y.nt + y.k1 + y.k2 + (2.0 + y.g1) / y.kn + y.kn / y.nt) +
           s.card / y.kn + y.kn * y.kn / (y.nt * y.g1) +
           s.norm1 * y.a * (1.0 / y.theta + std::pow(y.G2 + 1.0, l - 1) * (y.g2 / (y.theta * y.g1) + 1.0));
}

double epsilon_v_bound(const BoundParams& p, const SetSummary& s) {
    return eta_bound(p, s) +
           (s.card + s.norm1 * std::pow(p.gamma_limit[2] + 1.0, p.ell)) * (p.tv_edge + p.tv_vertex);
}

double maincoup_bound(const BoundParams& p, const std::vector<double>& root_weights) {
    const Sym y = symbols(p);
    const int l = p.ell;
    const double root = std::sqrt(y.nt);
    double sum_w = 0.0, sum_w2 = 0.0, sum_plus = 0.0;
    for (double w : root_weights) {
        sum_w += w;
        sum_w2 += w * w;
        if (w > root) sum_plus += w;
    }
    const double card = static_cast<double>(root_weights.size());
    return y.g2 / y.nt * sum_w2 + y.g1 * sum_plus +
           std::pow(y.g2 + 1.0, l) * (y.g3 / y.nt + y.k1 + y.k2 + (2.0 + y.g1) / y.kn + y.kn / y.nt) * sum_w +
           card / y.kn + y.kn * y.kn / (y.nt * y.g1) +
           sum_w * y.a * (1.0 / y.theta + std::pow(y.G2 + 1.0, l - 1) * (y.g2 / (y.theta * y.g1) + 1.0));
}

EpsRho epsilon_rho_sequences(const BoundParams& p) {
    const Sym y = symbols(p);
    const int l = p.ell;
    const double n = static_cast<double>(p.n);
    EpsRho r;
    r.epsilon = y.g2 * y.g2 / n + y.theta * y.k1 * y.g1 +
                y.g1 * y.theta * std::pow(y.g2 + 1.0, l) *
                    (y.g3 / y.nt + y.k1 + y.k2 + (2.0 + y.g1) / y.kn + y.kn / y.nt) +
                1.0 / y.kn + y.kn * y.kn / (y.nt * y.g1) +
                y.a * (y.g1 + std::pow(y.G2 + 1.0, l - 1) * (y.g2 + y.theta * y.g1)) +
                (1.0 + y.g1 * y.theta * std::pow(y.G2 + 1.0, l)) * (p.tv_edge + p.tv_vertex);
    const double raw = (y.theta * y.g2 + y.theta * y.g1 + 1.0) / y.nt * std::pow(y.g1 + 1.0, 2) *
                       std::pow(y.g2 + p.C, 2 * l + 1) * std::pow(y.g3 + 1.0, 2);
    r.rho = std::min(raw, 1.0);
    return r;
}

double rho_v_bound(const BoundParams& p, const SetSummary& s) {
    const Sym y = symbols(p);
    const double raw = std::pow(s.norm1 + s.card, 2) / y.nt * std::pow(y.g1 + 1.0, 2) *
                       std::pow(y.g2 + p.C, 2 * p.ell + 1) * std::pow(y.g3 + 1.0, 2);
    return std::min(raw, 1.0);
}

double clt_bound(const BoundParams& p, double sigma2, double me_delta_e, double mv_delta_v, double chi, double J) {
    if (!(sigma2 > 0.0)) throw std::domain_error("clt_bound: variance must be positive");
    const Sym y = symbols(p);
    const EpsRho er = epsilon_rho_sequences(p);
    const double n = static_cast<double>(p.n);
    const double ratio = n / sigma2;
    const double first = std::sqrt(ratio) * std::pow(std::sqrt(y.theta) + y.g2 + std::sqrt(chi), 2) *
                         (std::pow(me_delta_e, 1.0 / 8) + std::pow(mv_delta_v, 1.0 / 8) +
                          std::pow(er.epsilon, 1.0 / 16) + std::pow(er.rho, 1.0 / 16));
    const double second = std::pow(ratio, 0.75) * (y.theta * y.g1 + std::sqrt(chi)) / std::pow(n, 0.25);
    return p.C0 * std::pow(J, 0.25) * (first + second);
}

double blttl_bound(const BoundParams& p, double Wv) {
    const Sym y = symbols(p);
    const int l = p.ell;
    return structural::mean_norm(p, Wv, l, 2) * y.g2 / y.nt + structural::mean_excess(p, Wv, l) * y.g1 +
           structural::mean_weight(p, Wv, l) * (y.k1 + 1.0 / y.kn + y.kn / y.nt);
}

double repair_bound(const BoundParams& p, const SetSummary& s) {
    const Sym y = symbols(p);
    const int l = p.ell;
    const double lambda = y.nt * y.g1;
    return y.kn * y.kn / lambda +
           (s.card + s.norm1 * y.g1 * std::pow(y.g2 + 1.0, l - 1) + s.norm1 * std::pow(y.g2 + 1.0, l)) / y.kn;
}

double treecoup_bound(const BoundParams& p, const SetSummary& s) {
    const Sym y = symbols(p);
    return s.norm1 * y.a *
           (1.0 / y.theta + std::pow(y.G2 + 1.0, p.ell - 1) * (y.g2 / (y.theta * y.g1) + 1.0));
}

namespace structural {

double mean_norm(const BoundParams& p, double Wv, int ell, int power) {
    if (power < 0 || power > 2) throw std::invalid_argument("mean_norm: power must be 0, 1 or 2");
    if (ell == 0) return std::pow(Wv, power);
    return std::pow(Wv, power) + Wv * std::pow(p.m.gamma[2] + 1.0, ell - 1) * p.m.gamma[static_cast<std::size_t>(power) + 1];
}

double mean_size(const BoundParams& p, double Wv, int ell) {
    if (ell == 0) return 1.0;
    return 1.0 + Wv * p.m.gamma[1] * std::pow(p.m.gamma[2] + 1.0, ell - 1);
}

double mean_weight(const BoundParams& p, double Wv, int ell) { return Wv * std::pow(p.m.gamma[2] + 1.0, ell); }

double mean_excess(const BoundParams& p, double Wv, int ell) {
    const double own = Wv > std::sqrt(p.n_theta()) ? Wv : 0.0;
    if (ell == 0) return own;
    return own + Wv * std::pow(p.m.gamma[2] + 1.0, ell - 1) * p.m.kappa[2];
}

double second_moment(const BoundParams& p, double Wv, int ell, int power) {
    const auto& g = p.m.gamma;
    switch (power) {
        case 0:
            return p.C * std::pow(Wv + 1.0, 2) * std::pow(g[1] + 1.0, 2) * std::pow(g[2] + 2.0, 2 * ell) * (g[3] + 1.0);
        case 1:
            return p.C * std::pow(Wv + 1.0, 2) * std::pow(g[2] + 2.0, 2 * ell) * (g[3] + 1.0);
        default:
            throw std::invalid_argument("second_moment: power must be 0 or 1");
    }
}

double degree_moment(const BoundParams& p, double Wv, int k) {
    return std::pow(Wv + 1.0, k) * std::pow(p.m.gamma[1] + k, k);
}

double path(const BoundParams& p, double normU, double normV, int ell) {
    return normU * normV / p.n_theta() * std::pow(1.0 + p.m.gamma[2], ell - 1);
}

double vertex_in_ball(const BoundParams& p, double Wu, double Wv, int ell) {
    return Wu * Wv / p.n_theta() * std::pow(p.m.gamma[2] + 1.0, ell - 1);
}

double edge_in_ball(const BoundParams& p, double Wv, double Wu, double Wu2, int ell) {
    return Wv * (Wu + Wu2) / p.n_theta() * std::pow(p.m.gamma[2] + 1.0, ell - 1);
}

double not_tree(const BoundParams& p, double Wv, int ell) {
    return p.C * std::pow(1.0 + p.m.gamma[2], 2 * ell + 1) * (p.m.gamma[3] + 1.0) * std::pow(Wv + 1.0, 2) / p.n_theta();
}

double limit_tree_size(const BoundParams& p, double W, int ell) {
    return 1.0 + W * std::pow(p.gamma_limit[2] + 1.0, ell);
}

}  // namespace structural

}  // namespace irg
