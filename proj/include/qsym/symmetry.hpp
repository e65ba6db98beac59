#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsym/ensemble.hpp"
#include "qsym/group.hpp"
#include "qsym/partition.hpp"

namespace qsym {

/// Action induced on parameter labels by one group element.
struct InducedMap {
    int element = -1;           // index into GroupAction::elements
    std::vector<int> label_map; // label_map[t] = image label; a bijection when permissible
};

struct PermissibilityWitness {
    int element = -1;
    int phi = -1;
    int phi_prime = -1; // theta(phi) == theta(phi') but the images disagree under the element
};

struct PermissibilityResult {
    bool permissible = false;
    std::vector<InducedMap> induced;            // one per group element when permissible
    std::optional<PermissibilityWitness> witness;
};

/// Decides whether the group action descends to theta's labels: for every
/// element and every pair, theta(phi') == theta(phi) must force
/// theta(g phi') == theta(g phi).
inline PermissibilityResult check_permissible(const ParametricFunction& theta, const GroupAction& g) {
    if (theta.n() != g.n) throw error("check_permissible: theta not defined on the group's point set");
    PermissibilityResult res;
    int k = theta.label_count();
    for (std::size_t ei = 0; ei < g.elements.size(); ++ei) {
        const Perm& el = g.elements[ei];
        InducedMap im;
        im.element = static_cast<int>(ei);
        im.label_map.assign(k, -1);
        std::vector<int> first_phi(k, -1);
        for (int phi = 0; phi < g.n; ++phi) {
            int t = theta(phi);
            int image = theta(el[phi]);
            if (im.label_map[t] == -1) {
                im.label_map[t] = image;
                first_phi[t] = phi;
            } else if (im.label_map[t] != image) {
                res.permissible = false;
                res.witness = PermissibilityWitness{static_cast<int>(ei), phi, first_phi[t]};
                res.induced.clear();
                return res;
            }
        }
        res.induced.push_back(std::move(im));
    }
    res.permissible = true;
    return res;
}

/// The induced label maps of a permissible function; verifies that the
/// assignment element -> induced map is a homomorphism.
inline std::vector<InducedMap> induce_group(const ParametricFunction& theta, const GroupAction& g) {
    PermissibilityResult r = check_permissible(theta, g);
    if (!r.permissible) {
        const auto& w = *r.witness;
        throw error("induce_group: theta not permissible (element " + std::to_string(w.element) +
                    ", pair (" + std::to_string(w.phi) + "," + std::to_string(w.phi_prime) + "))");
    }
    for (const InducedMap& im : r.induced) {
        std::vector<char> seen(theta.label_count(), 0);
        for (int v : im.label_map) {
            if (v < 0 || seen[v]) throw error("induce_group: induced map is not a bijection");
            seen[v] = 1;
        }
    }
    // homomorphism: products and inverses map correctly
    auto lm = [&](int e) -> const std::vector<int>& { return r.induced[e].label_map; };
    for (std::size_t i = 0; i < g.elements.size(); ++i) {
        for (std::size_t j = 0; j < g.elements.size(); ++j) {
            int ij = g.index_of(compose(g.elements[i], g.elements[j]));
            for (int t = 0; t < theta.label_count(); ++t)
                if (lm(ij)[t] != lm(static_cast<int>(i))[lm(static_cast<int>(j))[t]])
                    throw error("induce_group: induced maps fail the homomorphism law");
        }
        int inv = g.invert(static_cast<int>(i));
        for (int t = 0; t < theta.label_count(); ++t)
            if (lm(inv)[lm(static_cast<int>(i))[t]] != t)
                throw error("induce_group: induced inverse mismatch");
    }
    return r.induced;
}

/// The induced maps as a group acting on theta's label set.
inline GroupAction induced_label_group(const ParametricFunction& theta, const GroupAction& g) {
    auto maps = induce_group(theta, g);
    std::vector<Perm> gens;
    for (const auto& im : maps)
        if (std::find(gens.begin(), gens.end(), im.label_map) == gens.end()) gens.push_back(im.label_map);
    return close_group(theta.label_count(), gens);
}

/// zeta(phi) = eta(theta(phi)); both inputs must be permissible at their level.
inline ParametricFunction compose_permissible(const ParametricFunction& eta_on_theta,
                                              const ParametricFunction& theta, const GroupAction& g) {
    if (eta_on_theta.n() != theta.label_count())
        throw error("compose_permissible: eta is not defined on theta's label set");
    GroupAction induced = induced_label_group(theta, g); // throws with witness if theta fails
    PermissibilityResult er = check_permissible(eta_on_theta, induced);
    if (!er.permissible) {
        const auto& w = *er.witness;
        throw error("compose_permissible: eta not permissible under the induced group (element " +
                    std::to_string(w.element) + ", labels " + std::to_string(w.phi) + "," +
                    std::to_string(w.phi_prime) + ")");
    }
    std::vector<int> vals(theta.n());
    for (int i = 0; i < theta.n(); ++i) vals[i] = eta_on_theta(theta(i));
    ParametricFunction zeta = ParametricFunction(std::move(vals)).canonical();
    if (!check_permissible(zeta, g).permissible)
        throw error("compose_permissible: composed function unexpectedly fails permissibility");
    return zeta;
}

inline constexpr int default_enumeration_max_n = 10;

/// One representative per permissible partition, in restricted-growth-string
/// order. Brute force; n is capped because partition counts are Bell numbers.
inline std::vector<ParametricFunction> enumerate_permissible(const GroupAction& g,
                                                             int max_n = default_enumeration_max_n) {
    if (g.n > max_n)
        throw error("enumerate_permissible: n = " + std::to_string(g.n) + " exceeds max_n = " +
                    std::to_string(max_n));
    std::vector<ParametricFunction> out;
    for_each_partition(g.n, [&](const ParametricFunction& p) {
        if (check_permissible(p, g).permissible) out.push_back(p);
    });
    return out;
}

struct MinimizeResult {
    bool group_descends = true;
    std::optional<PermissibilityWitness> witness; // set when the action fails to descend
    Ensemble minimized;
    ParametricFunction quotient; // old point -> new point
};

/// Quotients the state space by equality of the full probability profile
/// across all declared experiments.
inline MinimizeResult minimize_state_space(const Ensemble& e) {
    int n = e.n();
    std::vector<std::vector<double>> profile(n);
    for (int phi = 0; phi < n; ++phi)
        for (const Experiment& ex : e.experiments)
            for (int x = 0; x < ex.outcome_count; ++x) profile[phi].push_back(ex.prob(phi, x));

    std::vector<int> cls(n, -1);
    std::vector<int> reps;
    for (int phi = 0; phi < n; ++phi) {
        for (std::size_t j = 0; j < reps.size(); ++j)
            if (profile_eq(profile[reps[j]], profile[phi])) { cls[phi] = static_cast<int>(j); break; }
        if (cls[phi] < 0) {
            cls[phi] = static_cast<int>(reps.size());
            reps.push_back(phi);
        }
    }

    MinimizeResult res;
    res.quotient = ParametricFunction(cls);
    PermissibilityResult perm = check_permissible(res.quotient, e.group);
    if (!perm.permissible) {
        res.group_descends = false;
        res.witness = perm.witness;
        return res;
    }

    int n2 = static_cast<int>(reps.size());
    res.minimized.space.n = n2;
    res.minimized.space.nu.assign(n2, 0.0);
    for (int phi = 0; phi < n; ++phi) res.minimized.space.nu[cls[phi]] += e.space.nu[phi];

    std::vector<Perm> gens;
    for (const auto& im : perm.induced) {
        if (std::find(gens.begin(), gens.end(), im.label_map) == gens.end()) gens.push_back(im.label_map);
    }
    res.minimized.group = close_group(n2, gens);

    for (const Experiment& ex : e.experiments) {
        Experiment q = ex;
        std::vector<int> vals(n2, -1);
        for (int phi = 0; phi < n; ++phi) {
            if (vals[cls[phi]] == -1)
                vals[cls[phi]] = ex.theta(phi);
            else if (vals[cls[phi]] != ex.theta(phi))
                throw error("minimize_state_space: theta of '" + ex.name +
                            "' does not factor through the quotient (identifiability violated upstream)");
        }
        q.theta = ParametricFunction(std::move(vals));
        res.minimized.experiments.push_back(std::move(q));
    }
    return res;
}

} // namespace qsym
