#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qsym/ensemble.hpp"
#include "qsym/repspace.hpp"
#include "qsym/symmetry.hpp"

namespace qsym {

struct Posterior {
    std::vector<double> weights; // over Phi, normalized
};

/// Real coordinates per state; the default embeds phi as its index.
struct Embedding {
    std::vector<std::vector<double>> coords;
    int k() const { return coords.empty() ? 0 : static_cast<int>(coords.front().size()); }
};

inline Embedding default_embedding(int n) {
    Embedding emb;
    for (int i = 0; i < n; ++i) emb.coords.push_back({static_cast<double>(i)});
    return emb;
}

/// Posterior over Phi given one observed outcome, with prior nu.
inline Posterior posterior(const Ensemble& e, int a, int x) {
    const Experiment& ex = e.experiments.at(a);
    if (x < 0 || x >= ex.outcome_count) throw error("posterior: outcome out of range");
    Posterior post;
    post.weights.resize(e.n());
    double total = 0;
    for (int phi = 0; phi < e.n(); ++phi) {
        post.weights[phi] = ex.prob(phi, x) * e.space.nu[phi];
        total += post.weights[phi];
    }
    if (total <= 0) throw error("posterior: outcome has zero likelihood everywhere");
    for (double& w : post.weights) w /= total;
    return post;
}

/// Posterior mean of the embedded state (quadratic-loss optimum).
inline std::vector<double> estimate(const Ensemble& e, int a, int x, const Embedding& emb) {
    if (static_cast<int>(emb.coords.size()) != e.n()) throw error("estimate: embedding length mismatch");
    Posterior post = posterior(e, a, x);
    std::vector<double> out(emb.k(), 0.0);
    for (int phi = 0; phi < e.n(); ++phi)
        for (int j = 0; j < emb.k(); ++j) out[j] += post.weights[phi] * emb.coords[phi][j];
    return out;
}

/// Posterior mean of a derived parameter eta(phi) under its own embedding.
inline std::vector<double> estimate_function(const Ensemble& e, int a, int x,
                                             const ParametricFunction& eta,
                                             const std::vector<std::vector<double>>& eta_coords) {
    if (eta.n() != e.n()) throw error("estimate_function: eta not defined on the state space");
    if (static_cast<int>(eta_coords.size()) != eta.label_count())
        throw error("estimate_function: one coordinate list per eta label required");
    Posterior post = posterior(e, a, x);
    std::vector<double> out(eta_coords.front().size(), 0.0);
    for (int phi = 0; phi < e.n(); ++phi)
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += post.weights[phi] * eta_coords[eta(phi)][j];
    return out;
}

struct TwoFormulaeReport {
    std::vector<double> route_phi;    // posterior over Phi, mean of embedded theta
    std::vector<double> route_theta;  // pushforward prior, posterior over labels
    double max_diff = 0;
    bool equal = false;
    double phi_hat = 0;                    // index-embedding estimate
    std::optional<std::vector<double>> theta_at_phi_hat; // embedded theta at the nearest state
    bool theta_hat_equals_theta_of_phi_hat = false;
};

/// The estimate of theta computed through the state posterior and through the
/// pushforward-parameter posterior; the two must agree. Also records that
/// theta-hat generally differs from theta evaluated at phi-hat.
inline TwoFormulaeReport check_two_formulae(const Ensemble& e, int a, int x,
                                            const std::vector<std::vector<double>>& theta_coords) {
    const Experiment& ex = e.experiments.at(a);
    if (!check_permissible(ex.theta, e.group).permissible)
        throw error("check_two_formulae: theta of '" + ex.name + "' is not permissible");
    int k = ex.theta.label_count();
    if (static_cast<int>(theta_coords.size()) != k)
        throw error("check_two_formulae: one coordinate list per theta label required");

    TwoFormulaeReport rep;
    rep.route_phi = estimate_function(e, a, x, ex.theta, theta_coords);

    // pushforward prior nu_a(t), likelihood q_t(x), posterior over labels
    std::vector<double> nu_a(k, 0.0);
    for (int phi = 0; phi < e.n(); ++phi) nu_a[ex.theta(phi)] += e.space.nu[phi];
    std::vector<double> w(k);
    double total = 0;
    for (int t = 0; t < k; ++t) {
        w[t] = ex.prob_table[t][x] * nu_a[t];
        total += w[t];
    }
    if (total <= 0) throw error("check_two_formulae: outcome has zero likelihood everywhere");
    rep.route_theta.assign(theta_coords.front().size(), 0.0);
    for (int t = 0; t < k; ++t)
        for (std::size_t j = 0; j < rep.route_theta.size(); ++j)
            rep.route_theta[j] += w[t] / total * theta_coords[t][j];

    for (std::size_t j = 0; j < rep.route_theta.size(); ++j)
        rep.max_diff = std::max(rep.max_diff, std::abs(rep.route_phi[j] - rep.route_theta[j]));
    rep.equal = rep.max_diff <= eps_m;

    rep.phi_hat = estimate(e, a, x, default_embedding(e.n()))[0];
    int nearest = std::clamp(static_cast<int>(std::lround(rep.phi_hat)), 0, e.n() - 1);
    rep.theta_at_phi_hat = theta_coords[ex.theta(nearest)];
    double diff = 0;
    for (std::size_t j = 0; j < rep.route_phi.size(); ++j)
        diff = std::max(diff, std::abs(rep.route_phi[j] - (*rep.theta_at_phi_hat)[j]));
    rep.theta_hat_equals_theta_of_phi_hat = diff <= eps_m;
    return rep;
}

/// Affine action on embedding coordinates, one per sample-group element.
struct CoordAction {
    Eigen::MatrixXd linear;
    Eigen::VectorXd shift;

    std::vector<double> apply(const std::vector<double>& v) const {
        Eigen::VectorXd in(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) in[i] = v[i];
        Eigen::VectorXd out = linear * in + shift;
        return std::vector<double>(out.data(), out.data() + out.size());
    }
};

struct EquivarianceViolation {
    int element = -1; // sample-group element
    int outcome = -1; // -1 for compatibility failures
    std::string message;
};

struct EquivarianceReport {
    bool compatible = true; // sample-group action lifts to the parameter labels
    std::vector<EquivarianceViolation> violations;
    int checks = 0;
    bool ok() const { return compatible && violations.empty(); }
};

/// For every sample-group element g: the rows must transform consistently
/// (P_{g~theta}(E) = P_theta(g^{-1}E)), and the estimator must commute with
/// the declared coordinate action.
inline EquivarianceReport check_equivariance(const Ensemble& e, int a, const Embedding& emb,
                                             const std::vector<CoordAction>& actions) {
    const Experiment& ex = e.experiments.at(a);
    if (!ex.sample_group) throw error("check_equivariance: experiment has no sample group");
    const GroupAction& sg = *ex.sample_group;
    if (actions.size() != sg.elements.size())
        throw error("check_equivariance: one coordinate action per sample-group element required");

    EquivarianceReport rep;
    int k = ex.theta.label_count();
    for (std::size_t ei = 0; ei < sg.elements.size(); ++ei) {
        const Perm& g = sg.elements[ei];
        Perm ginv = inverse(g);
        // find the induced label map: row[g~t][x] = row[t][g^{-1} x]
        std::vector<int> label_map(k, -1);
        for (int t = 0; t < k; ++t) {
            std::vector<double> moved(ex.outcome_count);
            for (int x = 0; x < ex.outcome_count; ++x) moved[x] = ex.prob_table[t][ginv[x]];
            for (int t2 = 0; t2 < k; ++t2)
                if (profile_eq(ex.prob_table[t2], moved)) { label_map[t] = t2; break; }
            if (label_map[t] < 0) {
                rep.compatible = false;
                rep.violations.push_back({static_cast<int>(ei), -1,
                                          "no parameter label matches the transformed row of label " +
                                              std::to_string(t)});
            }
        }
        if (!rep.compatible) continue;
        for (int x = 0; x < ex.outcome_count; ++x) {
            ++rep.checks;
            std::vector<double> lhs = estimate(e, a, g[x], emb);
            std::vector<double> rhs = actions[ei].apply(estimate(e, a, x, emb));
            for (std::size_t j = 0; j < lhs.size(); ++j)
                if (std::abs(lhs[j] - rhs[j]) > eps_m) {
                    rep.violations.push_back({static_cast<int>(ei), x,
                                              "estimate(" + std::to_string(g[x]) +
                                                  ") differs from the transformed estimate(" +
                                                  std::to_string(x) + ") by " +
                                                  format_double(std::abs(lhs[j] - rhs[j]))});
                    break;
                }
        }
    }
    return rep;
}

struct ExtremeReport {
    struct Entry {
        std::string experiment;
        bool extreme = false;
        bool theta_injective = false;
    };
    std::vector<Entry> entries;
    std::vector<std::pair<int, int>> order; // (i, j) with experiment i a coarsening of experiment j
    bool exploratory = true;                // conjecture probe, never asserted
};

namespace detail {

/// True when `coarse` arises from `fine` by some outcome surjection.
inline bool is_coarsening_of(const Experiment& coarse, const Experiment& fine) {
    if (coarse.theta.n() != fine.theta.n()) return false;
    int mf = fine.outcome_count, mc = coarse.outcome_count;
    if (mc > mf) return false;
    double combos = std::pow(static_cast<double>(mc), mf);
    if (combos > 1e6) throw error("is_coarsening_of: outcome map search too large");
    std::vector<int> sigma(mf, 0);
    int n = fine.theta.n();
    while (true) {
        bool onto = true;
        {
            std::vector<char> hit(mc, 0);
            for (int v : sigma) hit[v] = 1;
            for (char c : hit)
                if (!c) { onto = false; break; }
        }
        if (onto) {
            bool ok = true;
            for (int phi = 0; phi < n && ok; ++phi)
                for (int xc = 0; xc < mc && ok; ++xc) {
                    double sum = 0;
                    for (int xf = 0; xf < mf; ++xf)
                        if (sigma[xf] == xc) sum += fine.prob(phi, xf);
                    if (std::abs(sum - coarse.prob(phi, xc)) > eps_p) ok = false;
                }
            if (ok) return true;
        }
        int i = 0;
        while (i < mf && ++sigma[i] == mc) sigma[i++] = 0;
        if (i == mf) break;
    }
    return false;
}

} // namespace detail

/// Extreme experiments under the coarsening order, with the injectivity probe
/// for the parameter map. Exploratory: results are reported, never asserted.
inline ExtremeReport check_extreme_identifiability(const Ensemble& e) {
    ExtremeReport rep;
    int ne = static_cast<int>(e.experiments.size());
    std::vector<std::vector<char>> below(ne, std::vector<char>(ne, 0));
    for (int i = 0; i < ne; ++i)
        for (int j = 0; j < ne; ++j)
            if (i != j) below[i][j] = detail::is_coarsening_of(e.experiments[i], e.experiments[j]);
    for (int i = 0; i < ne; ++i)
        for (int j = 0; j < ne; ++j)
            if (below[i][j]) rep.order.emplace_back(i, j);
    for (int i = 0; i < ne; ++i) {
        ExtremeReport::Entry entry;
        entry.experiment = e.experiments[i].name;
        entry.extreme = true;
        for (int j = 0; j < ne && entry.extreme; ++j) {
            // i strictly below j: i is a coarsening of j but not conversely
            if (i != j && below[i][j] && !below[j][i]) entry.extreme = false;
        }
        entry.theta_injective =
            e.experiments[i].theta.label_count() == e.n();
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

} // namespace qsym
