#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsym/group.hpp"
#include "qsym/partition.hpp"

namespace qsym {

struct StateSpace {
    int n = 0;
    std::vector<std::string> labels; // optional display names; empty or size n
    std::vector<double> nu;          // strictly positive weight per point

    static StateSpace uniform(int n) {
        StateSpace s;
        s.n = n;
        s.nu.assign(n, 1.0);
        return s;
    }
};

/// A discrete experiment: outcomes {0..m-1}, parameter labels via theta, and
/// one probability row per label.
struct Experiment {
    std::string name;
    int outcome_count = 0;
    ParametricFunction theta;
    std::vector<std::vector<double>> prob_table; // prob_table[label][x]
    std::optional<GroupAction> sample_group;     // action on outcomes

    /// P^a_{theta(phi)}(x)
    double prob(int phi, int x) const { return prob_table[theta(phi)][x]; }
};

struct Ensemble {
    StateSpace space;
    GroupAction group;
    std::vector<Experiment> experiments;

    int n() const { return space.n; }

    const Experiment& experiment(const std::string& name) const {
        for (const auto& e : experiments)
            if (e.name == name) return e;
        throw error("no experiment named '" + name + "'");
    }
    int experiment_index(const std::string& name) const {
        for (std::size_t i = 0; i < experiments.size(); ++i)
            if (experiments[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

struct Violation {
    std::string kind;       // "weight", "group", "theta", "row_sum", "entry_range", "identifiability", "shape"
    std::string experiment; // empty when not experiment-scoped
    int row = -1;           // theta label of the offending row
    int entry = -1;         // outcome index of the offending entry
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_ensemble(const Ensemble& e) {
    ValidationReport rep;
    auto add = [&](std::string kind, std::string exp, int row, int entry, std::string msg) {
        rep.violations.push_back({std::move(kind), std::move(exp), row, entry, std::move(msg)});
    };

    if (e.space.n < 1) add("shape", "", -1, -1, "state space must have at least one point");
    if (static_cast<int>(e.space.nu.size()) != e.space.n)
        add("shape", "", -1, -1, "weight list length differs from state space size");
    for (std::size_t i = 0; i < e.space.nu.size(); ++i)
        if (!(e.space.nu[i] > 0))
            add("weight", "", -1, static_cast<int>(i),
                "weight at point " + std::to_string(i) + " is not strictly positive");

    if (e.group.n != e.space.n)
        add("group", "", -1, -1, "group acts on a different point count than the state space");
    for (const Perm& el : e.group.elements)
        if (!is_bijection(el)) add("group", "", -1, -1, "group element is not a bijection");

    for (const Experiment& ex : e.experiments) {
        if (ex.outcome_count < 1) add("shape", ex.name, -1, -1, "outcome count must be >= 1");
        if (ex.theta.n() != e.space.n) {
            add("shape", ex.name, -1, -1, "theta is not defined on the whole state space");
            continue;
        }
        if (!ex.theta.labels_contiguous())
            add("theta", ex.name, -1, -1, "theta labels are not contiguous from 0");
        int k = ex.theta.label_count();
        if (static_cast<int>(ex.prob_table.size()) != k)
            add("shape", ex.name, -1, -1,
                "probability table has " + std::to_string(ex.prob_table.size()) + " rows, need " +
                    std::to_string(k));
        for (int t = 0; t < static_cast<int>(ex.prob_table.size()); ++t) {
            const auto& row = ex.prob_table[t];
            if (static_cast<int>(row.size()) != ex.outcome_count) {
                add("shape", ex.name, t, -1, "row length differs from outcome count");
                continue;
            }
            double sum = 0;
            for (int x = 0; x < ex.outcome_count; ++x) {
                if (row[x] < -eps_p || row[x] > 1 + eps_p)
                    add("entry_range", ex.name, t, x, "entry outside [0,1]");
                sum += row[x];
            }
            if (std::abs(sum - 1.0) > eps_p)
                add("row_sum", ex.name, t, -1,
                    "row sums to " + format_double(sum) + ", expected 1");
        }
        // identifiability: distinct labels must have distinct rows
        for (std::size_t a = 0; a < ex.prob_table.size(); ++a)
            for (std::size_t b = a + 1; b < ex.prob_table.size(); ++b)
                if (ex.prob_table[a].size() == ex.prob_table[b].size() &&
                    profile_eq(ex.prob_table[a], ex.prob_table[b]))
                    add("identifiability", ex.name, static_cast<int>(b), -1,
                        "labels " + std::to_string(a) + " and " + std::to_string(b) +
                            " share an identical row");
        if (ex.sample_group && ex.sample_group->n != ex.outcome_count)
            add("group", ex.name, -1, -1, "sample group acts on a different outcome count");
    }
    return rep;
}

/// G-orbits of the state space; the orbit label is the conserved quantity.
inline std::vector<std::vector<int>> orbits(const Ensemble& e) { return group_orbits(e.group); }

inline Ensemble restrict_to_orbit(const Ensemble& e, const std::vector<int>& orbit) {
    if (orbit.empty()) throw error("restrict_to_orbit: empty orbit");
    std::vector<int> to_new(e.n(), -1);
    for (std::size_t i = 0; i < orbit.size(); ++i) to_new[orbit[i]] = static_cast<int>(i);

    Ensemble out;
    out.space.n = static_cast<int>(orbit.size());
    out.space.nu.reserve(orbit.size());
    for (int p : orbit) {
        out.space.nu.push_back(e.space.nu[p]);
        if (!e.space.labels.empty()) out.space.labels.push_back(e.space.labels[p]);
    }

    // every group element restricts to a bijection of the orbit; the set of
    // restrictions is the induced group
    std::vector<Perm> restricted;
    for (const Perm& el : e.group.elements) {
        Perm r(orbit.size());
        for (std::size_t i = 0; i < orbit.size(); ++i) {
            int img = to_new[el[orbit[i]]];
            if (img < 0) throw error("restrict_to_orbit: set is not closed under the group");
            r[i] = img;
        }
        restricted.push_back(r);
    }
    std::vector<Perm> gens;
    for (const Perm& g : e.group.generators) {
        Perm r(orbit.size());
        for (std::size_t i = 0; i < orbit.size(); ++i) r[i] = to_new[g[orbit[i]]];
        if (std::find(gens.begin(), gens.end(), r) == gens.end()) gens.push_back(r);
    }
    out.group = close_group(static_cast<int>(orbit.size()), gens);

    for (const Experiment& ex : e.experiments) {
        Experiment r;
        r.name = ex.name;
        r.outcome_count = ex.outcome_count;
        r.sample_group = ex.sample_group;
        std::vector<int> vals;
        vals.reserve(orbit.size());
        for (int p : orbit) vals.push_back(ex.theta(p));
        // relabel contiguously, keep only surviving rows
        std::map<int, int> remap;
        for (int& v : vals) {
            auto it = remap.find(v);
            if (it == remap.end()) it = remap.emplace(v, static_cast<int>(remap.size())).first;
            v = it->second;
        }
        r.theta = ParametricFunction(std::move(vals));
        r.prob_table.resize(remap.size());
        for (const auto& [old_label, new_label] : remap) r.prob_table[new_label] = ex.prob_table[old_label];
        out.experiments.push_back(std::move(r));
    }
    return out;
}

/// Cartesian product of two compatible experiments on the same state space.
/// Outcome (x1, x2) is encoded as x1 * m2 + x2.
inline Experiment product_experiment(const Experiment& e1, const Experiment& e2) {
    if (e1.theta.n() != e2.theta.n()) throw error("product_experiment: mismatched state spaces");
    Experiment out;
    out.name = e1.name + "*" + e2.name;
    out.outcome_count = e1.outcome_count * e2.outcome_count;
    out.theta = join_functions({e1.theta, e2.theta});

    int k = out.theta.label_count();
    out.prob_table.assign(k, std::vector<double>(out.outcome_count, 0.0));
    std::vector<char> filled(k, 0);
    for (int phi = 0; phi < out.theta.n(); ++phi) {
        int t = out.theta(phi);
        if (filled[t]) continue;
        filled[t] = 1;
        const auto& r1 = e1.prob_table[e1.theta(phi)];
        const auto& r2 = e2.prob_table[e2.theta(phi)];
        for (int x1 = 0; x1 < e1.outcome_count; ++x1)
            for (int x2 = 0; x2 < e2.outcome_count; ++x2)
                out.prob_table[t][x1 * e2.outcome_count + x2] = r1[x1] * r2[x2];
    }
    return out;
}

struct CoarsenResult {
    Experiment experiment;
    std::vector<int> label_map;                // old theta label -> new theta label
    std::vector<std::vector<int>> merged_labels; // groups of old labels merged (size > 1 only)
};

/// Merges outcomes by a surjection onto {0..m'-1}; rows are summed within
/// merged classes. Labels left indistinguishable by the coarser experiment
/// are merged and reported.
inline CoarsenResult coarsen_experiment(const Experiment& e, const std::vector<int>& outcome_merge) {
    if (static_cast<int>(outcome_merge.size()) != e.outcome_count)
        throw error("coarsen_experiment: merge map must cover every outcome");
    int m2 = 0;
    for (int v : outcome_merge) m2 = std::max(m2, v + 1);
    {
        std::vector<char> hit(m2, 0);
        for (int v : outcome_merge) {
            if (v < 0) throw error("coarsen_experiment: negative target outcome");
            hit[v] = 1;
        }
        for (char c : hit)
            if (!c) throw error("coarsen_experiment: merge map is not onto 0.." + std::to_string(m2 - 1));
    }

    int k = e.theta.label_count();
    std::vector<std::vector<double>> rows(k, std::vector<double>(m2, 0.0));
    for (int t = 0; t < k; ++t)
        for (int x = 0; x < e.outcome_count; ++x) rows[t][outcome_merge[x]] += e.prob_table[t][x];

    // identifiability after coarsening: merge labels with identical rows
    CoarsenResult res;
    res.label_map.assign(k, -1);
    std::vector<std::vector<double>> kept;
    std::vector<std::vector<int>> groups;
    for (int t = 0; t < k; ++t) {
        int found = -1;
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (profile_eq(kept[j], rows[t])) { found = static_cast<int>(j); break; }
        if (found < 0) {
            found = static_cast<int>(kept.size());
            kept.push_back(rows[t]);
            groups.push_back({});
        }
        res.label_map[t] = found;
        groups[found].push_back(t);
    }
    for (const auto& g : groups)
        if (g.size() > 1) res.merged_labels.push_back(g);

    res.experiment.name = e.name + "/coarse";
    res.experiment.outcome_count = m2;
    res.experiment.prob_table = std::move(kept);
    std::vector<int> vals(e.theta.values);
    for (int& v : vals) v = res.label_map[v];
    res.experiment.theta = ParametricFunction(std::move(vals));
    return res;
}

} // namespace qsym
