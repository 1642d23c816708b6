#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "latree/tree.hpp"

namespace latree {

namespace detail {

/// Nontrivial bipartitions of the observed label set induced by tree edges.
/// Each split is kept as the side containing the smallest observed label;
/// edges that induce the same split (chains through hidden nodes) collapse
/// naturally in the set.
inline std::set<std::vector<int>> observed_splits(const LatentTree& t) {
    const auto obs = t.observed_ids();
    const int total = static_cast<int>(obs.size());
    std::set<int> obs_set(obs.begin(), obs.end());
    std::set<std::vector<int>> splits;
    if (obs.empty()) return splits;
    const int min_label = obs.front();
    std::map<int, std::vector<int>> adj;
    for (auto [a, b] : t.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto [ea, eb] : t.edges) {
        // observed labels on ea's side of the removed edge
        std::vector<int> side;
        std::set<int> seen{ea, eb};
        std::queue<int> q;
        q.push(ea);
        if (obs_set.count(ea)) side.push_back(ea);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u]) {
                if (seen.count(v)) continue;
                seen.insert(v);
                if (obs_set.count(v)) side.push_back(v);
                q.push(v);
            }
        }
        const int k = static_cast<int>(side.size());
        if (k < 2 || total - k < 2) continue;
        std::sort(side.begin(), side.end());
        if (!std::binary_search(side.begin(), side.end(), min_label)) {
            std::vector<int> other;
            for (int x : obs)
                if (!std::binary_search(side.begin(), side.end(), x)) other.push_back(x);
            side = std::move(other);
        }
        splits.insert(side);
    }
    return splits;
}

}  // namespace detail

/// Robinson-Foulds distance as the size of the symmetric difference between
/// the observed-leaf split sets of the two trees.
inline int rf_distance(const LatentTree& t1, const LatentTree& t2) {
    if (t1.observed_ids() != t2.observed_ids())
        throw std::invalid_argument("rf_distance: observed label sets differ");
    auto s1 = detail::observed_splits(t1);
    auto s2 = detail::observed_splits(t2);
    int diff = 0;
    for (const auto& s : s1)
        if (!s2.count(s)) ++diff;
    for (const auto& s : s2)
        if (!s1.count(s)) ++diff;
    return diff;
}

/// Worst-case RF used to score failed reconstruction runs: every true split
/// missed plus as many spurious splits as a binary tree could introduce.
inline int rf_worst_case(const LatentTree& truth) {
    const int o = truth.observed_count();
    return static_cast<int>(detail::observed_splits(truth).size()) + std::max(0, o - 3);
}

/// Fraction of result rows with nonzero RF.
inline double error_rate(const std::vector<int>& rf_values) {
    if (rf_values.empty()) throw std::invalid_argument("error_rate: empty input");
    int bad = 0;
    for (int v : rf_values)
        if (v > 0) ++bad;
    return static_cast<double>(bad) / rf_values.size();
}

}  // namespace latree
