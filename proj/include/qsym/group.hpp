#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "qsym/common.hpp"

namespace qsym {

/// A permutation of {0..n-1} as an image list: p[i] is the image of i.
using Perm = std::vector<int>;

inline Perm identity_perm(int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

inline bool is_bijection(const Perm& p) {
    std::vector<char> seen(p.size(), 0);
    for (int v : p) {
        if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

/// compose(p, q) applies q first, then p.
inline Perm compose(const Perm& p, const Perm& q) {
    Perm r(p.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
    return r;
}

inline Perm inverse(const Perm& p) {
    Perm r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
    return r;
}

/// A finite group of permutations of {0..n-1}, stored as its full closure.
struct GroupAction {
    int n = 0;
    std::vector<Perm> generators;
    std::vector<Perm> elements;   // closure, breadth-first order; [0] is the identity
    int identity_index = 0;

    std::size_t size() const { return elements.size(); }

    int index_of(const Perm& p) const {
        for (std::size_t i = 0; i < elements.size(); ++i)
            if (elements[i] == p) return static_cast<int>(i);
        return -1;
    }

    int multiply(int i, int j) const { return index_of(compose(elements[i], elements[j])); }
    int invert(int i) const { return index_of(inverse(elements[i])); }
};

inline constexpr std::size_t default_group_cap = 10080;

/// Closes a generator set into a full group. Breadth-first from the identity,
/// new elements of each level sorted lexicographically.
inline GroupAction close_group(int n, std::vector<Perm> generators,
                               std::size_t cap = default_group_cap) {
    for (const Perm& g : generators) {
        if (static_cast<int>(g.size()) != n || !is_bijection(g))
            throw error("close_group: generator is not a bijection of 0.." + std::to_string(n - 1));
    }
    GroupAction ga;
    ga.n = n;
    ga.generators = generators;

    std::map<Perm, int> seen;
    std::vector<Perm> frontier;
    Perm id = identity_perm(n);
    seen[id] = 0;
    ga.elements.push_back(id);
    frontier.push_back(id);
    while (!frontier.empty()) {
        std::vector<Perm> next;
        for (const Perm& e : frontier) {
            for (const Perm& g : generators) {
                Perm w = compose(e, g);
                if (!seen.count(w)) next.push_back(w);
                seen[w] = 1; // mark; index assigned after sorting the level
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (const Perm& w : next) {
            if (ga.elements.size() >= cap)
                throw error("close_group: closure exceeds cap " + std::to_string(cap));
            ga.elements.push_back(w);
        }
        frontier = std::move(next);
    }
    ga.identity_index = 0;
    return ga;
}

inline GroupAction trivial_group(int n) { return close_group(n, {identity_perm(n)}); }

inline GroupAction cyclic_group(int n) {
    Perm c(n);
    for (int i = 0; i < n; ++i) c[i] = (i + 1) % n;
    return close_group(n, {c});
}

inline GroupAction dihedral_group(int n) {
    Perm c(n), r(n);
    for (int i = 0; i < n; ++i) {
        c[i] = (i + 1) % n;
        r[i] = (n - i) % n;
    }
    return close_group(n, {c, r});
}

inline GroupAction symmetric_group(int n, std::size_t cap = default_group_cap) {
    std::vector<Perm> gens;
    for (int i = 0; i + 1 < n; ++i) {
        Perm t = identity_perm(n);
        std::swap(t[i], t[i + 1]);
        gens.push_back(t);
    }
    if (gens.empty()) gens.push_back(identity_perm(n));
    return close_group(n, gens, cap);
}

/// Orbits of the action on {0..n-1}, each sorted, ordered by least member.
inline std::vector<std::vector<int>> group_orbits(const GroupAction& g) {
    std::vector<char> done(g.n, 0);
    std::vector<std::vector<int>> orbits;
    for (int s = 0; s < g.n; ++s) {
        if (done[s]) continue;
        std::vector<int> orb;
        std::vector<int> stack{s};
        done[s] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            orb.push_back(x);
            for (const Perm& e : g.elements) {
                if (!done[e[x]]) {
                    done[e[x]] = 1;
                    stack.push_back(e[x]);
                }
            }
        }
        std::sort(orb.begin(), orb.end());
        orbits.push_back(orb);
    }
    return orbits;
}

} // namespace qsym
