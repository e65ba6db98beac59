#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsym/ensemble.hpp"
#include "qsym/symmetry.hpp"

namespace qsym {

struct PropositionOrigin {
    bool synthetic = false;
    std::string experiment;  // name; for synthetic ones a generated name
    std::vector<int> event;  // outcome subset, sorted
    int outcome_count = 0;   // of the originating experiment, 0 when unknown
    std::string note;        // provenance for synthetic propositions
};

/// An (experiment, event) pair identified with its probability profile over
/// the state space. The canonical id is assigned when a poset adopts it.
struct Proposition {
    PropositionOrigin origin;
    std::vector<double> profile;    // value at phi
    ParametricFunction theta;       // parameter of the originating experiment
    int id = -1;

    int n() const { return static_cast<int>(profile.size()); }
};

/// profile(phi) = sum over the event of P^a_{theta(phi)}(x)
inline Proposition proposition_of(const Experiment& e, std::vector<int> event) {
    std::sort(event.begin(), event.end());
    event.erase(std::unique(event.begin(), event.end()), event.end());
    for (int x : event)
        if (x < 0 || x >= e.outcome_count) throw error("proposition_of: outcome outside the experiment");
    Proposition p;
    p.origin = {false, e.name, event, e.outcome_count, ""};
    p.theta = e.theta;
    p.profile.assign(e.theta.n(), 0.0);
    for (int phi = 0; phi < e.theta.n(); ++phi)
        for (int x : event) p.profile[phi] += e.prob(phi, x);
    return p;
}

inline bool leq(const Proposition& p1, const Proposition& p2) {
    if (p1.n() != p2.n()) throw error("leq: propositions live on different state spaces");
    return profile_leq(p1.profile, p2.profile);
}

/// Complement of the event within its experiment; involution, order-reversing.
inline Proposition orthocomplement(const Proposition& p) {
    Proposition q;
    q.theta = p.theta;
    q.profile.resize(p.profile.size());
    for (std::size_t i = 0; i < p.profile.size(); ++i) q.profile[i] = 1.0 - p.profile[i];
    q.origin = p.origin;
    if (!p.origin.synthetic && p.origin.outcome_count > 0) {
        q.origin.event.clear();
        for (int x = 0; x < p.origin.outcome_count; ++x)
            if (std::find(p.origin.event.begin(), p.origin.event.end(), x) == p.origin.event.end())
                q.origin.event.push_back(x);
    } else {
        q.origin.synthetic = true;
        q.origin.event.clear();
        q.origin.note = "complement: " + p.origin.note;
    }
    return q;
}

/// Orthogonality of a family: the profile sum stays <= 1 everywhere.
inline bool is_orthogonal(const std::vector<Proposition>& ps) {
    if (ps.empty()) return true;
    std::vector<double> sum(ps.front().n(), 0.0);
    for (const Proposition& p : ps) {
        if (p.n() != static_cast<int>(sum.size()))
            throw error("is_orthogonal: propositions live on different state spaces");
        for (int i = 0; i < p.n(); ++i) sum[i] += p.profile[i];
    }
    for (double v : sum)
        if (v > 1.0 + eps_p) return false;
    return true;
}

struct Assumption1Violation {
    std::vector<int> members; // indices into the checked set
    int phi = -1;             // point where the joint sum exceeds 1
    double sum = 0;
};

struct Assumption1Report {
    std::vector<Assumption1Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Scans k-subsets (default k = 3) for families that are pairwise orthogonal
/// but not orthogonal.
inline Assumption1Report check_assumption1(const std::vector<Proposition>& ps, int max_k = 3) {
    Assumption1Report rep;
    int n = ps.empty() ? 0 : ps.front().n();
    auto pair_ok = [&](int i, int j) {
        for (int t = 0; t < n; ++t)
            if (ps[i].profile[t] + ps[j].profile[t] > 1.0 + eps_p) return false;
        return true;
    };
    std::vector<int> idx;
    std::function<void(int, int)> rec = [&](int start, int k) {
        if (static_cast<int>(idx.size()) >= 2 && static_cast<int>(idx.size()) <= max_k &&
            static_cast<int>(idx.size()) == k) {
            // pairwise orthogonality is ensured during selection; test the joint sum
            for (int t = 0; t < n; ++t) {
                double s = 0;
                for (int i : idx) s += ps[i].profile[t];
                if (s > 1.0 + eps_p) {
                    rep.violations.push_back({idx, t, s});
                    break;
                }
            }
            return;
        }
        if (static_cast<int>(idx.size()) == k) return;
        for (int i = start; i < static_cast<int>(ps.size()); ++i) {
            bool ok = true;
            for (int j : idx)
                if (!pair_ok(j, i)) { ok = false; break; }
            if (!ok) continue;
            idx.push_back(i);
            rec(i + 1, k);
            idx.pop_back();
        }
    };
    for (int k = 3; k <= max_k; ++k) rec(0, k);
    return rep;
}

struct JointSynthesis {
    Experiment experiment;
    std::vector<std::vector<int>> events; // events[i] reproduces input profile i
};

/// Realizes an orthogonal family as disjoint events of one synthetic
/// experiment. Outcome i carries the i-th profile; a remainder outcome is
/// appended unless the family already exhausts total probability.
inline JointSynthesis synthesize_joint(const std::vector<Proposition>& ps) {
    if (ps.empty()) throw error("synthesize_joint: empty family");
    if (!is_orthogonal(ps)) throw error("synthesize_joint: family is not orthogonal");
    int n = ps.front().n();
    int k = static_cast<int>(ps.size());

    std::vector<ParametricFunction> thetas;
    for (const Proposition& p : ps) thetas.push_back(p.theta);
    ParametricFunction join = join_functions(thetas);

    int labels = join.label_count();
    std::vector<std::vector<double>> rows(labels, std::vector<double>(k + 1, 0.0));
    std::vector<char> filled(labels, 0);
    bool remainder_used = false;
    for (int phi = 0; phi < n; ++phi) {
        int t = join(phi);
        if (filled[t]) {
            for (int i = 0; i < k; ++i)
                if (!approx_eq(rows[t][i], ps[i].profile[phi]))
                    throw error("synthesize_joint: profile is not measurable for the joined parameter");
            continue;
        }
        filled[t] = 1;
        double sum = 0;
        for (int i = 0; i < k; ++i) {
            rows[t][i] = ps[i].profile[phi];
            sum += rows[t][i];
        }
        rows[t][k] = std::max(0.0, 1.0 - sum);
        if (rows[t][k] > eps_p) remainder_used = true;
    }
    if (!remainder_used)
        for (auto& r : rows) r.pop_back();

    // identifiability: merge labels with identical rows, relabel by first occurrence
    std::vector<int> label_map(labels, -1);
    std::vector<std::vector<double>> kept;
    for (int t = 0; t < labels; ++t) {
        int found = -1;
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (profile_eq(kept[j], rows[t])) { found = static_cast<int>(j); break; }
        if (found < 0) {
            found = static_cast<int>(kept.size());
            kept.push_back(rows[t]);
        }
        label_map[t] = found;
    }
    std::vector<int> vals(n);
    for (int phi = 0; phi < n; ++phi) vals[phi] = label_map[join(phi)];

    JointSynthesis out;
    out.experiment.name = "joint";
    for (const Proposition& p : ps)
        out.experiment.name += ":" + (p.origin.experiment.empty() ? "?" : p.origin.experiment);
    out.experiment.outcome_count = remainder_used ? k + 1 : k;
    out.experiment.theta = ParametricFunction(std::move(vals));
    out.experiment.prob_table = std::move(kept);
    for (int i = 0; i < k; ++i) out.events.push_back({i});
    return out;
}

/// Supremum of an orthogonal pair: the profile sum, realized as the union
/// event of the synthesized joint experiment.
inline Proposition sup_orthogonal(const Proposition& p1, const Proposition& p2) {
    if (!is_orthogonal({p1, p2})) throw error("sup_orthogonal: pair is not orthogonal");
    JointSynthesis js = synthesize_joint({p1, p2});
    Proposition p;
    p.origin.synthetic = true;
    p.origin.experiment = js.experiment.name;
    p.origin.event = {0, 1};
    p.origin.note = "orthogonal supremum";
    p.theta = js.experiment.theta;
    p.profile.resize(p1.profile.size());
    for (std::size_t i = 0; i < p.profile.size(); ++i) p.profile[i] = p1.profile[i] + p2.profile[i];
    return p;
}

// ---------------------------------------------------------------------------

struct PosetOptions {
    bool closure = true;       // close under orthocomplement and orthogonal sums
    std::size_t cap = 4096;
};

/// Finite proposition poset: profiles deduplicated at eps_p, ordered by
/// pointwise dominance. Index 0/1 lookups via zero_id/one_id.
struct PropositionPoset {
    std::vector<Proposition> props;
    int zero_id = -1;
    int one_id = -1;

    int size() const { return static_cast<int>(props.size()); }

    int find(const std::vector<double>& profile) const {
        for (int i = 0; i < size(); ++i)
            if (profile_eq(props[i].profile, profile)) return i;
        return -1;
    }

    bool leq_ids(int i, int j) const { return profile_leq(props[i].profile, props[j].profile); }

    /// Least element of the dominating set, when the poset has one.
    /// Returns -1 when no unique least dominating element exists.
    int join_in_poset(int a, int b) const {
        int best = -1;
        double best_sum = 0;
        for (int i = 0; i < size(); ++i) {
            if (!leq_ids(a, i) || !leq_ids(b, i)) continue;
            double s = 0;
            for (double v : props[i].profile) s += v;
            if (best < 0 || s < best_sum) { best = i; best_sum = s; }
        }
        if (best < 0) return -1;
        for (int i = 0; i < size(); ++i)
            if (leq_ids(a, i) && leq_ids(b, i) && !leq_ids(best, i)) return -1;
        return best;
    }

    /// Greatest element of the dominated set, when the poset has one.
    int meet_in_poset(int a, int b) const {
        int best = -1;
        double best_sum = 0;
        for (int i = 0; i < size(); ++i) {
            if (!leq_ids(i, a) || !leq_ids(i, b)) continue;
            double s = 0;
            for (double v : props[i].profile) s += v;
            if (best < 0 || s > best_sum) { best = i; best_sum = s; }
        }
        if (best < 0) return -1;
        for (int i = 0; i < size(); ++i)
            if (leq_ids(i, a) && leq_ids(i, b) && !leq_ids(i, best)) return -1;
        return best;
    }
};

namespace detail {

// Insert with profile deduplication; assigns the canonical id at creation.
inline int poset_insert(PropositionPoset& ps, Proposition p, std::size_t cap) {
    int found = ps.find(p.profile);
    if (found >= 0) return found;
    if (ps.props.size() >= cap)
        throw error("build_poset: proposition cap " + std::to_string(cap) + " exceeded");
    p.id = static_cast<int>(ps.props.size());
    ps.props.push_back(std::move(p));
    return ps.props.back().id;
}

} // namespace detail

/// All event propositions of all experiments, deduplicated by profile, then
/// optionally closed under orthocomplement and orthogonal profile sums (the
/// degenerate equal pair included, so every orthogonal supremum the
/// orthomodularity identity mentions is materialized).
inline PropositionPoset build_poset(const Ensemble& e, PosetOptions opts = {}) {
    PropositionPoset ps;
    for (const Experiment& ex : e.experiments) {
        for (int mask = 0; mask < (1 << ex.outcome_count); ++mask) {
            std::vector<int> event;
            for (int x = 0; x < ex.outcome_count; ++x)
                if (mask >> x & 1) event.push_back(x);
            detail::poset_insert(ps, proposition_of(ex, event), opts.cap);
        }
    }
    int n = e.n();
    auto zero_profile = std::vector<double>(n, 0.0);
    auto one_profile = std::vector<double>(n, 1.0);
    if (ps.find(zero_profile) < 0) {
        Proposition z;
        z.origin = {true, "", {}, 0, "zero"};
        z.theta = constant_function(n);
        z.profile = zero_profile;
        detail::poset_insert(ps, z, opts.cap);
    }
    if (ps.find(one_profile) < 0) {
        Proposition o;
        o.origin = {true, "", {}, 0, "one"};
        o.theta = constant_function(n);
        o.profile = one_profile;
        detail::poset_insert(ps, o, opts.cap);
    }

    if (opts.closure) {
        bool changed = true;
        while (changed) {
            changed = false;
            int cur = ps.size();
            for (int i = 0; i < cur; ++i) {
                std::vector<double> c(n);
                for (int t = 0; t < n; ++t) c[t] = 1.0 - ps.props[i].profile[t];
                if (ps.find(c) < 0) {
                    Proposition q;
                    q.origin = {true, ps.props[i].origin.experiment, {}, 0,
                                "complement of #" + std::to_string(i)};
                    q.theta = ps.props[i].theta;
                    q.profile = std::move(c);
                    detail::poset_insert(ps, q, opts.cap);
                    changed = true;
                }
            }
            cur = ps.size();
            for (int i = 0; i < cur; ++i) {
                for (int j = i; j < cur; ++j) {
                    std::vector<double> s(n);
                    bool orth = true;
                    for (int t = 0; t < n; ++t) {
                        s[t] = ps.props[i].profile[t] + ps.props[j].profile[t];
                        if (s[t] > 1.0 + eps_p) { orth = false; break; }
                    }
                    if (!orth) continue;
                    if (ps.find(s) < 0) {
                        Proposition q;
                        q.origin = {true, "", {}, 0,
                                    "orthogonal sum of #" + std::to_string(i) + " and #" + std::to_string(j)};
                        q.theta = join_functions({ps.props[i].theta, ps.props[j].theta});
                        q.profile = std::move(s);
                        detail::poset_insert(ps, q, opts.cap);
                        changed = true;
                    }
                }
            }
        }
    }

    ps.zero_id = ps.find(zero_profile);
    ps.one_id = ps.find(one_profile);
    return ps;
}

// ---------------------------------------------------------------------------

struct OrthomodularWitness {
    int p1 = -1, p2 = -1;
    std::string stage;  // which element of the identity chain failed
    int found = -1;     // id the chain produced, -1 when a lookup failed
};

struct OrthomodularReport {
    int pairs_checked = 0;
    std::vector<OrthomodularWitness> witnesses;
    bool ok() const { return witnesses.empty(); }
};

/// Verifies p2 == p1 v (p2^perp v p1)^perp for every ordered pair p1 <= p2,
/// resolving each supremum of an orthogonal pair as its profile sum inside
/// the poset.
inline OrthomodularReport check_orthomodular(const PropositionPoset& ps) {
    OrthomodularReport rep;
    int n = ps.size() ? ps.props.front().n() : 0;
    std::vector<double> tmp(n);
    for (int i = 0; i < ps.size(); ++i) {
        for (int j = 0; j < ps.size(); ++j) {
            if (i == j || !ps.leq_ids(i, j)) continue;
            ++rep.pairs_checked;
            for (int t = 0; t < n; ++t) tmp[t] = ps.props[i].profile[t] + 1.0 - ps.props[j].profile[t];
            int s = ps.find(tmp);
            if (s < 0) {
                rep.witnesses.push_back({i, j, "p2^perp v p1 missing", -1});
                continue;
            }
            for (int t = 0; t < n; ++t) tmp[t] = 1.0 - ps.props[s].profile[t];
            int d = ps.find(tmp);
            if (d < 0) {
                rep.witnesses.push_back({i, j, "(p2^perp v p1)^perp missing", -1});
                continue;
            }
            for (int t = 0; t < n; ++t) tmp[t] = ps.props[i].profile[t] + ps.props[d].profile[t];
            int u = ps.find(tmp);
            if (u < 0) {
                rep.witnesses.push_back({i, j, "p1 v (p2^perp v p1)^perp missing", -1});
                continue;
            }
            if (u != j) rep.witnesses.push_back({i, j, "identity mismatch", u});
        }
    }
    return rep;
}

struct DistributivityWitness {
    int p1, p2, p3;
    std::string law;          // "meet_over_join" or "join_over_meet"
    int lhs = -1, rhs = -1;   // -1 when a lattice operation had no unique extremum
    bool partial = false;     // some meet/join did not exist in the poset
};

struct DistributivityReport {
    long long triples_checked = 0;
    std::vector<DistributivityWitness> witnesses;  // genuine failures
    long long partial_triples = 0;                 // skipped: lattice op missing
    bool ok() const { return witnesses.empty(); }
};

namespace detail {

struct LatticeTables {
    std::vector<int> join, meet; // size x size, -1 = no unique extremum
    int size = 0;
    int j(int a, int b) const { return join[a * size + b]; }
    int m(int a, int b) const { return meet[a * size + b]; }
};

inline LatticeTables lattice_tables(const PropositionPoset& ps) {
    LatticeTables t;
    t.size = ps.size();
    t.join.assign(static_cast<std::size_t>(t.size) * t.size, -1);
    t.meet.assign(static_cast<std::size_t>(t.size) * t.size, -1);
    for (int a = 0; a < t.size; ++a)
        for (int b = a; b < t.size; ++b) {
            int j = ps.join_in_poset(a, b);
            int m = ps.meet_in_poset(a, b);
            t.join[a * t.size + b] = t.join[b * t.size + a] = j;
            t.meet[a * t.size + b] = t.meet[b * t.size + a] = m;
        }
    return t;
}

} // namespace detail

inline constexpr int distributive_full_scan_limit = 256;

/// Evaluates both distributive laws with in-poset meets and joins, either on
/// the given triples or on every triple (posets up to a size limit).
inline DistributivityReport check_distributive(const PropositionPoset& ps,
                                               const std::vector<std::array<int, 3>>* triples = nullptr) {
    if (!triples && ps.size() > distributive_full_scan_limit)
        throw error("check_distributive: poset too large for a full scan; pass explicit triples");
    detail::LatticeTables lt = detail::lattice_tables(ps);
    DistributivityReport rep;
    auto eval = [&](int a, int b, int c) {
        ++rep.triples_checked;
        // a ^ (b v c) == (a ^ b) v (a ^ c)
        {
            int bc = lt.j(b, c);
            int ab = lt.m(a, b), ac = lt.m(a, c);
            if (bc < 0 || ab < 0 || ac < 0) {
                ++rep.partial_triples;
            } else {
                int lhs = lt.m(a, bc), rhs = lt.j(ab, ac);
                if (lhs < 0 || rhs < 0)
                    ++rep.partial_triples;
                else if (lhs != rhs)
                    rep.witnesses.push_back({a, b, c, "meet_over_join", lhs, rhs, false});
            }
        }
        // a v (b ^ c) == (a v b) ^ (a v c)
        {
            int bc = lt.m(b, c);
            int ab = lt.j(a, b), ac = lt.j(a, c);
            if (bc < 0 || ab < 0 || ac < 0) {
                ++rep.partial_triples;
            } else {
                int lhs = lt.j(a, bc), rhs = lt.m(ab, ac);
                if (lhs < 0 || rhs < 0)
                    ++rep.partial_triples;
                else if (lhs != rhs)
                    rep.witnesses.push_back({a, b, c, "join_over_meet", lhs, rhs, false});
            }
        }
    };
    if (triples) {
        for (const auto& tr : *triples) eval(tr[0], tr[1], tr[2]);
    } else {
        for (int a = 0; a < ps.size(); ++a)
            for (int b = 0; b < ps.size(); ++b)
                for (int c = 0; c < ps.size(); ++c) eval(a, b, c);
    }
    return rep;
}

/// Supremum construction for an arbitrary finite set: the pointwise maximum
/// as a function of the joined parameter, realized by a two-outcome
/// synthetic experiment. Minimal among dominating propositions measurable in
/// the joined parameter.
inline Proposition sup_general(const Ensemble& e, const std::vector<Proposition>& ps) {
    if (ps.empty()) throw error("sup_general: empty set");
    std::vector<ParametricFunction> thetas;
    for (const Proposition& p : ps) thetas.push_back(p.theta);
    ParametricFunction join = join_functions(thetas);
    PermissibilityResult perm = check_permissible(join, e.group);
    if (!perm.permissible) {
        const auto& w = *perm.witness;
        throw error("sup_general: joined parameter is not permissible (element " +
                    std::to_string(w.element) + ", pair (" + std::to_string(w.phi) + "," +
                    std::to_string(w.phi_prime) + "))");
    }
    int n = e.n();
    std::vector<double> q(n, 0.0);
    for (int phi = 0; phi < n; ++phi)
        for (const Proposition& p : ps) q[phi] = std::max(q[phi], p.profile[phi]);

    // two-outcome synthetic experiment with parameter join: rows (q(t), 1-q(t))
    int labels = join.label_count();
    std::vector<std::vector<double>> rows(labels, std::vector<double>(2, 0.0));
    std::vector<char> filled(labels, 0);
    for (int phi = 0; phi < n; ++phi) {
        int t = join(phi);
        if (!filled[t]) {
            filled[t] = 1;
            rows[t][0] = q[phi];
            rows[t][1] = 1.0 - q[phi];
        }
    }
    std::vector<int> label_map(labels, -1);
    std::vector<std::vector<double>> kept;
    for (int t = 0; t < labels; ++t) {
        int found = -1;
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (profile_eq(kept[j], rows[t])) { found = static_cast<int>(j); break; }
        if (found < 0) {
            found = static_cast<int>(kept.size());
            kept.push_back(rows[t]);
        }
        label_map[t] = found;
    }
    std::vector<int> vals(n);
    for (int phi = 0; phi < n; ++phi) vals[phi] = label_map[join(phi)];

    Proposition out;
    out.origin.synthetic = true;
    out.origin.experiment = "sup";
    out.origin.event = {0};
    out.origin.note = "pointwise supremum over " + std::to_string(ps.size()) + " propositions";
    out.theta = ParametricFunction(std::move(vals));
    out.profile = std::move(q);
    return out;
}

struct AtomicityReport {
    std::vector<int> atoms;
    std::vector<int> elements_without_atom;              // violates atomicity
    std::vector<std::array<int, 3>> covering_violations; // (p1, atom, intermediate)
    long long covering_pairs_checked = 0;
    long long covering_pairs_partial = 0;                // join missing in the poset
    bool separable = true;                               // finite posets always are
    bool atomic() const { return elements_without_atom.empty(); }
    bool covering_ok() const { return covering_violations.empty(); }
};

inline AtomicityReport check_atomic_covering_separable(const PropositionPoset& ps) {
    AtomicityReport rep;
    int N = ps.size();
    auto strictly_less = [&](int a, int b) { return a != b && ps.leq_ids(a, b); };
    for (int i = 0; i < N; ++i) {
        if (i == ps.zero_id) continue;
        bool atom = true;
        for (int j = 0; j < N; ++j)
            if (j != ps.zero_id && strictly_less(j, i)) { atom = false; break; }
        if (atom) rep.atoms.push_back(i);
    }
    for (int i = 0; i < N; ++i) {
        if (i == ps.zero_id) continue;
        bool has = false;
        for (int a : rep.atoms)
            if (ps.leq_ids(a, i)) { has = true; break; }
        if (!has) rep.elements_without_atom.push_back(i);
    }
    for (int p = 0; p < N; ++p) {
        for (int a : rep.atoms) {
            int m = ps.meet_in_poset(p, a);
            if (m != ps.zero_id) continue;
            ++rep.covering_pairs_checked;
            int join = ps.join_in_poset(p, a);
            if (join < 0) {
                ++rep.covering_pairs_partial;
                continue;
            }
            for (int r = 0; r < N; ++r)
                if (strictly_less(p, r) && strictly_less(r, join))
                    rep.covering_violations.push_back({p, a, r});
        }
    }
    return rep;
}

} // namespace qsym
