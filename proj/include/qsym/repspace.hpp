#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "qsym/group.hpp"
#include "qsym/partition.hpp"
#include "qsym/symmetry.hpp"

namespace qsym {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Unitary operator of the left regular action on L^2(Phi, nu).
struct RepOperator {
    Mat matrix;
};

/// Invariant subspace by an orthonormal basis in the nu-weighted inner
/// product <u,v> = sum nu(phi) conj(u(phi)) v(phi).
struct Subspace {
    Mat basis;  // n x d, columns orthonormal under diag(nu)
    std::optional<ParametricFunction> generator;

    int dim() const { return static_cast<int>(basis.cols()); }
};

inline Eigen::VectorXd nu_vector(const std::vector<double>& nu) {
    Eigen::VectorXd v(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) v[i] = nu[i];
    return v;
}

/// U(g) f(phi) = f(g^{-1} phi); a permutation matrix per group element.
/// nu must be invariant under the action.
inline std::vector<RepOperator> regular_rep(const GroupAction& g, const std::vector<double>& nu) {
    if (static_cast<int>(nu.size()) != g.n) throw error("regular_rep: weight length mismatch");
    for (std::size_t ei = 0; ei < g.elements.size(); ++ei)
        for (int phi = 0; phi < g.n; ++phi)
            if (std::abs(nu[g.elements[ei][phi]] - nu[phi]) > eps_p)
                throw error("regular_rep: nu not invariant under element " + std::to_string(ei) +
                            " at point " + std::to_string(phi));
    std::vector<RepOperator> ops;
    ops.reserve(g.elements.size());
    for (const Perm& el : g.elements) {
        Mat u = Mat::Zero(g.n, g.n);
        for (int j = 0; j < g.n; ++j) u(el[j], j) = 1.0; // maps e_j to e_{g(j)}
        ops.push_back({std::move(u)});
    }
    return ops;
}

/// nu-normalized indicator functions of the level sets; dimension equals the
/// label count.
inline Subspace subspace_of_function(const ParametricFunction& theta, const std::vector<double>& nu) {
    int n = theta.n();
    int k = theta.label_count();
    Mat b = Mat::Zero(n, k);
    std::vector<double> mass(k, 0.0);
    for (int phi = 0; phi < n; ++phi) mass[theta(phi)] += nu[phi];
    for (int phi = 0; phi < n; ++phi) b(phi, theta(phi)) = 1.0 / std::sqrt(mass[theta(phi)]);
    Subspace s;
    s.basis = std::move(b);
    s.generator = theta;
    return s;
}

/// Projection onto the subspace in the nu inner product: B B^dagger diag(nu).
inline Mat nu_projector(const Subspace& v, const std::vector<double>& nu) {
    Eigen::VectorXd w = nu_vector(nu);
    return v.basis * v.basis.adjoint() * w.asDiagonal();
}

inline bool check_invariant(const Subspace& v, const std::vector<RepOperator>& rep,
                            const std::vector<double>& nu) {
    Mat proj = nu_projector(v, nu);
    for (const RepOperator& u : rep) {
        Mat moved = u.matrix * v.basis;
        Mat residual = moved - proj * moved;
        if (residual.cwiseAbs().maxCoeff() > eps_m) return false;
    }
    return true;
}

inline bool subspace_contains(const Subspace& v2, const Subspace& v1, const std::vector<double>& nu) {
    Mat proj = nu_projector(v2, nu);
    Mat residual = v1.basis - proj * v1.basis;
    return residual.cwiseAbs().maxCoeff() <= eps_m;
}

struct CorrespondenceReport {
    std::vector<ParametricFunction> classes; // permissible partition representatives
    std::vector<int> dims;
    bool injective = true;
    bool order_isomorphic = true;
    bool invariance_match = true; // permissible <=> level-set subspace invariant
    std::vector<std::string> mismatches;
    bool ok() const { return injective && order_isomorphic && invariance_match; }
};

/// Exhaustive check of the bijection between permissible-function classes and
/// invariant level-set subspaces, including the order isomorphism between
/// refinement and inclusion.
inline CorrespondenceReport correspondence_report(const GroupAction& g, const std::vector<double>& nu,
                                                  int max_n = 8) {
    if (g.n > max_n)
        throw error("correspondence_report: n exceeds max_n = " + std::to_string(max_n));
    CorrespondenceReport rep;
    std::vector<RepOperator> U = regular_rep(g, nu);

    // dual enumeration: permissibility filter vs subspace-invariance filter
    for_each_partition(g.n, [&](const ParametricFunction& p) {
        bool perm = check_permissible(p, g).permissible;
        bool inv = check_invariant(subspace_of_function(p, nu), U, nu);
        if (perm != inv) {
            rep.invariance_match = false;
            rep.mismatches.push_back("partition permissibility and subspace invariance disagree");
        }
        if (perm) rep.classes.push_back(p);
    });

    std::vector<Subspace> spaces;
    for (const auto& c : rep.classes) {
        spaces.push_back(subspace_of_function(c, nu));
        rep.dims.push_back(spaces.back().dim());
    }
    for (std::size_t i = 0; i < rep.classes.size(); ++i) {
        for (std::size_t j = 0; j < rep.classes.size(); ++j) {
            if (i == j) continue;
            bool same_space = subspace_contains(spaces[i], spaces[j], nu) &&
                              subspace_contains(spaces[j], spaces[i], nu);
            if (same_space) {
                rep.injective = false;
                rep.mismatches.push_back("distinct classes share one subspace");
            }
            bool order = preceq(rep.classes[i], rep.classes[j]);       // theta_i is a function of theta_j
            bool incl = subspace_contains(spaces[j], spaces[i], nu);   // V_i inside V_j
            if (order != incl) {
                rep.order_isomorphic = false;
                rep.mismatches.push_back("refinement order and inclusion disagree at pair (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    return rep;
}

struct ProjectionResult {
    Vec on_labels; // f_a over theta labels
    Vec lifted;    // f_a composed with theta, length n
};

/// Conditional mean onto the level sets: f_a(t) = sum_{theta=t} f nu / nu_a(t)
/// with nu_a the pushforward measure.
inline ProjectionResult project_onto_function(const Vec& f, const ParametricFunction& theta,
                                              const std::vector<double>& nu) {
    int n = theta.n();
    if (f.size() != n) throw error("project_onto_function: length mismatch");
    int k = theta.label_count();
    Vec fa = Vec::Zero(k);
    std::vector<double> mass(k, 0.0);
    for (int phi = 0; phi < n; ++phi) {
        fa[theta(phi)] += f[phi] * nu[phi];
        mass[theta(phi)] += nu[phi];
    }
    for (int t = 0; t < k; ++t) fa[t] /= mass[t];
    ProjectionResult res;
    res.on_labels = fa;
    res.lifted.resize(n);
    for (int phi = 0; phi < n; ++phi) res.lifted[phi] = fa[theta(phi)];
    return res;
}

inline double nu_norm_sq(const Vec& f, const std::vector<double>& nu) {
    double s = 0;
    for (int i = 0; i < f.size(); ++i) s += std::norm(f[i]) * nu[i];
    return s;
}

struct LeastSquaresReport {
    int trials = 0;
    int violations = 0;          // competitor beat the projection
    double min_margin = 0;       // smallest (competitor loss - projection loss)
    bool equality_at_projection = false;
    bool ok() const { return violations == 0 && equality_at_projection; }
};

/// The projection minimizes the nu-distance among theta-measurable functions;
/// seeded random competitors must never beat it.
inline LeastSquaresReport check_least_squares(const Vec& f, const ParametricFunction& theta,
                                              const std::vector<double>& nu, int trials,
                                              std::uint64_t seed = 0) {
    LeastSquaresReport rep;
    rep.trials = trials;
    ProjectionResult pr = project_onto_function(f, theta, nu);
    double base = nu_norm_sq(f - pr.lifted, nu);
    rep.equality_at_projection = true;
    rep.min_margin = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int n = theta.n();
    int k = theta.label_count();
    for (int trial = 0; trial < trials; ++trial) {
        Vec g(k);
        for (int t = 0; t < k; ++t) g[t] = cplx(gauss(rng), gauss(rng));
        Vec lifted(n);
        for (int phi = 0; phi < n; ++phi) lifted[phi] = g[theta(phi)];
        double loss = nu_norm_sq(f - lifted, nu);
        double margin = loss - base;
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < -1e-12) ++rep.violations;
    }
    return rep;
}

} // namespace qsym
