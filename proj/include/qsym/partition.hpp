#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "qsym/common.hpp"

namespace qsym {

/// A parametric function on a finite state space, represented by its label
/// list. Labels are contiguous small integers starting at 0; two functions
/// are the same parametric function iff they induce the same partition.
struct ParametricFunction {
    std::vector<int> values; // values[phi] = label

    ParametricFunction() = default;
    explicit ParametricFunction(std::vector<int> v) : values(std::move(v)) {}

    int n() const { return static_cast<int>(values.size()); }
    int operator()(int phi) const { return values[phi]; }

    int label_count() const {
        int m = -1;
        for (int v : values) m = std::max(m, v);
        return m + 1;
    }

    bool labels_contiguous() const {
        int k = label_count();
        std::vector<char> seen(k, 0);
        for (int v : values) {
            if (v < 0 || v >= k) return false;
            seen[v] = 1;
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    }

    /// Relabels by first occurrence; canonical representative of the partition.
    ParametricFunction canonical() const {
        std::map<int, int> remap;
        std::vector<int> out(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            auto it = remap.find(values[i]);
            if (it == remap.end()) it = remap.emplace(values[i], static_cast<int>(remap.size())).first;
            out[i] = it->second;
        }
        return ParametricFunction(std::move(out));
    }

    std::vector<std::vector<int>> level_sets() const {
        std::vector<std::vector<int>> ls(label_count());
        for (std::size_t i = 0; i < values.size(); ++i) ls[values[i]].push_back(static_cast<int>(i));
        return ls;
    }

    bool same_partition(const ParametricFunction& o) const {
        return canonical().values == o.canonical().values;
    }
};

inline ParametricFunction constant_function(int n) {
    return ParametricFunction(std::vector<int>(n, 0));
}

inline ParametricFunction identity_function(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return ParametricFunction(std::move(v));
}

/// Common refinement of a family of labelings, labels by first occurrence.
inline ParametricFunction join_functions(const std::vector<ParametricFunction>& fs) {
    if (fs.empty()) throw error("join_functions: empty input");
    int n = fs.front().n();
    for (const auto& f : fs)
        if (f.n() != n) throw error("join_functions: mismatched state spaces");
    std::map<std::vector<int>, int> keys;
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> key(fs.size());
        for (std::size_t j = 0; j < fs.size(); ++j) key[j] = fs[j](i);
        auto it = keys.find(key);
        if (it == keys.end()) it = keys.emplace(std::move(key), static_cast<int>(keys.size())).first;
        out[i] = it->second;
    }
    return ParametricFunction(std::move(out));
}

/// theta1 <= theta2 iff theta1 is a function of theta2 (theta2 refines theta1).
inline bool preceq(const ParametricFunction& t1, const ParametricFunction& t2) {
    if (t1.n() != t2.n()) throw error("preceq: mismatched state spaces");
    std::map<int, int> psi;
    for (int i = 0; i < t1.n(); ++i) {
        auto it = psi.find(t2(i));
        if (it == psi.end())
            psi.emplace(t2(i), t1(i));
        else if (it->second != t1(i))
            return false;
    }
    return true;
}

/// Groups functions with identical partitions; class representative is the
/// first occurrence. Returns indices into the input list.
inline std::vector<std::vector<int>> equivalence_classes(const std::vector<ParametricFunction>& fs) {
    std::map<std::vector<int>, int> reps;
    std::vector<std::vector<int>> classes;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        auto key = fs[i].canonical().values;
        auto it = reps.find(key);
        if (it == reps.end()) {
            reps.emplace(std::move(key), static_cast<int>(classes.size()));
            classes.push_back({static_cast<int>(i)});
        } else {
            classes[it->second].push_back(static_cast<int>(i));
        }
    }
    return classes;
}

/// Visits every partition of {0..n-1} in restricted-growth-string order.
inline void for_each_partition(int n, const std::function<void(const ParametricFunction&)>& fn) {
    std::vector<int> a(n, 0);
    std::function<void(int, int)> rec = [&](int i, int maxv) {
        if (i == n) {
            fn(ParametricFunction(a));
            return;
        }
        for (int v = 0; v <= maxv + 1; ++v) {
            a[i] = v;
            rec(i + 1, std::max(maxv, v));
        }
    };
    if (n == 0) return;
    a[0] = 0;
    rec(1, 0);
}

} // namespace qsym
