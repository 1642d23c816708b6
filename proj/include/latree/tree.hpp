#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace latree {

enum class NodeKind { observed, hidden };

/// Labeled tree with an observed/hidden partition. Node ids are arbitrary
/// unique integers; generator-built trees use 0..o-1 for observed nodes and
/// o.. for hidden ones.
struct LatentTree {
    std::vector<int> ids;
    std::vector<NodeKind> kinds;  // parallel to ids
    std::vector<std::pair<int, int>> edges;
    int root = -1;  // node id, or -1 when unrooted

    int node_count() const { return static_cast<int>(ids.size()); }

    int index_of(int id) const {
        for (int i = 0; i < node_count(); ++i)
            if (ids[i] == id) return i;
        throw std::invalid_argument("unknown node id " + std::to_string(id));
    }

    bool has_node(int id) const {
        return std::find(ids.begin(), ids.end(), id) != ids.end();
    }

    NodeKind kind_of(int id) const { return kinds[index_of(id)]; }
    bool is_observed(int id) const { return kind_of(id) == NodeKind::observed; }

    std::vector<int> observed_ids() const {
        std::vector<int> out;
        for (int i = 0; i < node_count(); ++i)
            if (kinds[i] == NodeKind::observed) out.push_back(ids[i]);
        std::sort(out.begin(), out.end());
        return out;
    }

    int observed_count() const { return static_cast<int>(observed_ids().size()); }

    // Adjacency indexed by node position (same order as ids).
    std::vector<std::vector<int>> adjacency_indexed() const {
        std::map<int, int> pos;
        for (int i = 0; i < node_count(); ++i) pos[ids[i]] = i;
        std::vector<std::vector<int>> adj(node_count());
        for (auto [a, b] : edges) {
            adj[pos.at(a)].push_back(pos.at(b));
            adj[pos.at(b)].push_back(pos.at(a));
        }
        for (auto& v : adj) std::sort(v.begin(), v.end());
        return adj;
    }

    int degree(int id) const {
        int d = 0;
        for (auto [a, b] : edges) d += (a == id) + (b == id);
        return d;
    }
};

/// Structural problems, empty when the tree is a connected acyclic graph with
/// unique ids. Hidden-degree and contiguity checks are reported separately.
inline std::vector<std::string> tree_structure_issues(const LatentTree& t) {
    std::vector<std::string> issues;
    const int n = t.node_count();
    if (n == 0) {
        issues.push_back("empty node set");
        return issues;
    }
    if (t.kinds.size() != t.ids.size()) issues.push_back("ids/kinds size mismatch");
    std::set<int> uniq(t.ids.begin(), t.ids.end());
    if (static_cast<int>(uniq.size()) != n) issues.push_back("duplicate node ids");
    for (auto [a, b] : t.edges) {
        if (!uniq.count(a) || !uniq.count(b)) issues.push_back("edge references unknown id");
        if (a == b) issues.push_back("self loop");
    }
    if (static_cast<int>(t.edges.size()) != n - 1)
        issues.push_back("edge count != node count - 1");
    // connectivity
    auto adj = t.adjacency_indexed();
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                q.push(v);
            }
    }
    if (reached != n) issues.push_back("not connected");
    if (t.root != -1 && !uniq.count(t.root)) issues.push_back("root id unknown");
    return issues;
}

inline bool is_valid_tree(const LatentTree& t) { return tree_structure_issues(t).empty(); }

/// Condition that every hidden node has at least three neighbors.
inline bool hidden_degrees_ok(const LatentTree& t) {
    for (int i = 0; i < t.node_count(); ++i)
        if (t.kinds[i] == NodeKind::hidden && t.degree(t.ids[i]) < 3) return false;
    return true;
}

/// Hop counts between all nodes (indexed by node position).
inline std::vector<std::vector<int>> hop_distances(const LatentTree& t) {
    const int n = t.node_count();
    auto adj = t.adjacency_indexed();
    std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
    for (int s = 0; s < n; ++s) {
        d[s][s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u])
                if (d[s][v] < 0) {
                    d[s][v] = d[s][u] + 1;
                    q.push(v);
                }
        }
    }
    return d;
}

inline int tree_diameter(const LatentTree& t) {
    auto d = hop_distances(t);
    int best = 0;
    for (const auto& row : d)
        for (int v : row) best = std::max(best, v);
    return best;
}

/// Node ids along the path from `a` to `b`, inclusive.
inline std::vector<int> tree_path(const LatentTree& t, int a, int b) {
    const int n = t.node_count();
    auto adj = t.adjacency_indexed();
    int ia = t.index_of(a), ib = t.index_of(b);
    std::vector<int> prev(n, -1);
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(ia);
    seen[ia] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (u == ib) break;
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                prev[v] = u;
                q.push(v);
            }
    }
    std::vector<int> path;
    for (int cur = ib; cur != -1; cur = prev[cur]) {
        path.push_back(t.ids[cur]);
        if (cur == ia) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// ---------------------------------------------------------------------------
// Archetype constructors. Observed nodes always take ids 0..o-1.
// ---------------------------------------------------------------------------

enum class Archetype { hmm, double_binary, full_m_tree, double_star };

inline Archetype archetype_from_string(const std::string& s) {
    if (s == "hmm") return Archetype::hmm;
    if (s == "double_binary") return Archetype::double_binary;
    if (s == "full_m_tree") return Archetype::full_m_tree;
    if (s == "double_star") return Archetype::double_star;
    throw std::invalid_argument("unknown archetype '" + s + "'");
}

inline std::string archetype_to_string(Archetype a) {
    switch (a) {
        case Archetype::hmm: return "hmm";
        case Archetype::double_binary: return "double_binary";
        case Archetype::full_m_tree: return "full_m_tree";
        case Archetype::double_star: return "double_star";
    }
    return "?";
}

/// Markov-chain shape: backbone v_0..v_D with observed endpoints, hidden
/// interior nodes each carrying one observed leaf. Diameter D, D+1 observed.
inline LatentTree build_hmm(int diameter) {
    if (diameter < 2)
        throw std::invalid_argument("hmm requires diameter >= 2");
    const int D = diameter;
    LatentTree t;
    // observed: 0 = left end, 1..D-1 = leaves of interior nodes, D = right end
    for (int i = 0; i <= D; ++i) {
        t.ids.push_back(i);
        t.kinds.push_back(NodeKind::observed);
    }
    // hidden interior backbone: ids D+1 .. 2D-1 stand for v_1..v_{D-1}
    for (int i = 1; i <= D - 1; ++i) {
        t.ids.push_back(D + i);
        t.kinds.push_back(NodeKind::hidden);
    }
    auto backbone = [&](int i) { return D + i; };  // v_i for 1<=i<=D-1
    t.edges.emplace_back(0, backbone(1));
    for (int i = 1; i < D - 1; ++i) t.edges.emplace_back(backbone(i), backbone(i + 1));
    t.edges.emplace_back(backbone(D - 1), D);
    for (int i = 1; i <= D - 1; ++i) t.edges.emplace_back(i, backbone(i));
    t.root = backbone(1);
    return t;
}

/// Two complete binary trees joined at their roots; leaves observed.
/// Diameter must be odd and >= 3; the number of observed nodes is
/// 2^((diameter+1)/2).
inline LatentTree build_double_binary(int diameter) {
    if (diameter < 3 || diameter % 2 == 0)
        throw std::invalid_argument("double_binary requires odd diameter >= 3");
    const int depth = (diameter - 1) / 2;  // depth of each half below its root
    const int leaves_per_side = 1 << depth;
    const int o = 2 * leaves_per_side;
    LatentTree t;
    for (int i = 0; i < o; ++i) {
        t.ids.push_back(i);
        t.kinds.push_back(NodeKind::observed);
    }
    int next = o;
    auto new_hidden = [&]() {
        t.ids.push_back(next);
        t.kinds.push_back(NodeKind::hidden);
        return next++;
    };
    // builds a complete binary subtree returning its root; leaves are taken
    // from [leaf_base, ...) left to right
    auto build_side = [&](int leaf_base) {
        std::vector<int> level;
        for (int i = 0; i < leaves_per_side; ++i) level.push_back(leaf_base + i);
        while (level.size() > 1) {
            std::vector<int> up;
            for (size_t i = 0; i + 1 < level.size(); i += 2) {
                int h = new_hidden();
                t.edges.emplace_back(level[i], h);
                t.edges.emplace_back(level[i + 1], h);
                up.push_back(h);
            }
            level = up;
        }
        return level[0];
    };
    int r1 = build_side(0);
    int r2 = build_side(leaves_per_side);
    t.edges.emplace_back(r1, r2);
    t.root = r1;
    return t;
}

/// Complete m-ary tree of the given depth; leaves observed, internals hidden.
inline LatentTree build_full_m_tree(int m, int depth) {
    if (m < 3) throw std::invalid_argument("full_m_tree requires m >= 3");
    if (depth < 1) throw std::invalid_argument("full_m_tree requires depth >= 1");
    int leaves = 1;
    for (int i = 0; i < depth; ++i) leaves *= m;
    LatentTree t;
    for (int i = 0; i < leaves; ++i) {
        t.ids.push_back(i);
        t.kinds.push_back(NodeKind::observed);
    }
    int next = leaves;
    auto new_hidden = [&]() {
        t.ids.push_back(next);
        t.kinds.push_back(NodeKind::hidden);
        return next++;
    };
    std::vector<int> level(leaves);
    for (int i = 0; i < leaves; ++i) level[i] = i;
    while (level.size() > 1) {
        std::vector<int> up;
        for (size_t i = 0; i < level.size(); i += m) {
            int h = new_hidden();
            for (int j = 0; j < m; ++j) t.edges.emplace_back(level[i + j], h);
            up.push_back(h);
        }
        level = up;
    }
    t.root = level[0];
    return t;
}

/// Two adjacent hidden hubs of degree d_max, each with d_max-1 observed leaves.
inline LatentTree build_double_star(int d_max) {
    if (d_max < 3) throw std::invalid_argument("double_star requires d_max >= 3");
    const int per_hub = d_max - 1;
    const int o = 2 * per_hub;
    LatentTree t;
    for (int i = 0; i < o; ++i) {
        t.ids.push_back(i);
        t.kinds.push_back(NodeKind::observed);
    }
    const int h1 = o, h2 = o + 1;
    t.ids.push_back(h1);
    t.kinds.push_back(NodeKind::hidden);
    t.ids.push_back(h2);
    t.kinds.push_back(NodeKind::hidden);
    for (int i = 0; i < per_hub; ++i) t.edges.emplace_back(i, h1);
    for (int i = per_hub; i < o; ++i) t.edges.emplace_back(i, h2);
    t.edges.emplace_back(h1, h2);
    t.root = h1;
    return t;
}

/// size_param is the diameter for hmm/double_binary, the depth for
/// full_m_tree (with m = 3), and d_max for double_star.
inline LatentTree build_archetype(Archetype kind, int size_param, int m = 3) {
    switch (kind) {
        case Archetype::hmm: return build_hmm(size_param);
        case Archetype::double_binary: return build_double_binary(size_param);
        case Archetype::full_m_tree: return build_full_m_tree(m, size_param);
        case Archetype::double_star: return build_double_star(size_param);
    }
    throw std::invalid_argument("unknown archetype");
}

}  // namespace latree
