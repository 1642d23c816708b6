#include <catch2/catch.hpp>
#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "latree/random.hpp"
#include "latree/rf.hpp"
#include "latree/tree.hpp"

using namespace latree;

namespace {

// Independent split enumerator for the oracle: bitmask over observed labels,
// reachability recomputed from scratch per edge with an adjacency matrix.
std::set<std::uint64_t> oracle_splits(const LatentTree& t) {
    const int n = t.node_count();
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    std::map<int, int> pos;
    for (int i = 0; i < n; ++i) pos[t.ids[i]] = i;
    for (auto [a, b] : t.edges) adj[pos[a]][pos[b]] = adj[pos[b]][pos[a]] = 1;
    std::vector<int> obs;
    for (int i = 0; i < n; ++i)
        if (t.kinds[i] == NodeKind::observed) obs.push_back(i);
    std::map<int, int> obs_rank;  // label -> bit
    {
        std::vector<int> labels;
        for (int i : obs) labels.push_back(t.ids[i]);
        std::sort(labels.begin(), labels.end());
        for (size_t k = 0; k < labels.size(); ++k) obs_rank[labels[k]] = static_cast<int>(k);
    }
    const int total = static_cast<int>(obs.size());
    std::set<std::uint64_t> out;
    for (size_t e = 0; e < t.edges.size(); ++e) {
        const int ea = pos[t.edges[e].first], eb = pos[t.edges[e].second];
        std::vector<char> seen(n, 0);
        seen[ea] = seen[eb] = 1;
        std::vector<int> stack{ea};
        std::uint64_t mask = 0;
        int count = 0;
        if (t.kinds[ea] == NodeKind::observed) {
            mask |= 1ull << obs_rank[t.ids[ea]];
            ++count;
        }
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (!adj[u][v] || seen[v]) continue;
                seen[v] = 1;
                if (t.kinds[v] == NodeKind::observed) {
                    mask |= 1ull << obs_rank[t.ids[v]];
                    ++count;
                }
                stack.push_back(v);
            }
        }
        if (count < 2 || total - count < 2) continue;
        if (!(mask & 1ull)) mask = (~mask) & ((1ull << total) - 1);  // canonical side holds bit 0
        out.insert(mask);
    }
    return out;
}

int oracle_rf(const LatentTree& a, const LatentTree& b) {
    const auto sa = oracle_splits(a), sb = oracle_splits(b);
    int diff = 0;
    for (auto m : sa) diff += sb.count(m) == 0;
    for (auto m : sb) diff += sa.count(m) == 0;
    return diff;
}

// random latent tree over a fixed observed label set 0..o-1 plus a few
// hidden nodes; hidden leaves are pruned so every hidden node is internal
LatentTree random_tree(Rng& rng, int o) {
    const int extra = static_cast<int>(rng.below(4));
    const int n = o + extra;
    std::vector<int> ids(n);
    std::vector<NodeKind> kinds(n);
    for (int i = 0; i < n; ++i) {
        ids[i] = i;
        kinds[i] = i < o ? NodeKind::observed : NodeKind::hidden;
    }
    // random attachment over a shuffled order so hidden nodes mix in
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i)
        edges.emplace_back(order[static_cast<int>(rng.below(i))], order[i]);
    // prune hidden leaves until none remain
    bool changed = true;
    std::set<int> removed;
    while (changed) {
        changed = false;
        std::map<int, int> deg;
        for (auto [a, b] : edges) {
            ++deg[a];
            ++deg[b];
        }
        for (int i = o; i < n; ++i) {
            if (removed.count(i)) continue;
            if (deg[i] <= 1) {
                removed.insert(i);
                std::vector<std::pair<int, int>> keep;
                for (auto e : edges)
                    if (e.first != i && e.second != i) keep.push_back(e);
                edges = keep;
                changed = true;
            }
        }
    }
    LatentTree t;
    for (int i = 0; i < n; ++i) {
        if (removed.count(i)) continue;
        t.ids.push_back(i);
        t.kinds.push_back(kinds[i]);
    }
    t.edges = edges;
    return t;
}

}  // namespace

TEST_CASE("rf distance of a tree with itself is zero") {
    const LatentTree t = build_hmm(6);
    CHECK(rf_distance(t, t) == 0);
}

TEST_CASE("star versus resolved quartet differs by one split") {
    LatentTree star;
    star.ids = {0, 1, 2, 3, 4};
    star.kinds = {NodeKind::observed, NodeKind::observed, NodeKind::observed,
                  NodeKind::observed, NodeKind::hidden};
    star.edges = {{0, 4}, {1, 4}, {2, 4}, {3, 4}};
    const LatentTree quartet = build_double_star(3);  // split {0,1} | {2,3}
    CHECK(rf_distance(star, quartet) == 1);
    CHECK(rf_distance(quartet, star) == 1);
}

TEST_CASE("caterpillar pair matches the split enumeration oracle") {
    // 5-leaf caterpillars with orders (0,1,2,3,4) and (0,2,1,3,4)
    auto caterpillar = [](std::vector<int> order) {
        LatentTree t;
        for (int i = 0; i < 5; ++i) {
            t.ids.push_back(i);
            t.kinds.push_back(NodeKind::observed);
        }
        // internal chain 5-6-7 with leaves attached
        for (int h : {5, 6, 7}) {
            t.ids.push_back(h);
            t.kinds.push_back(NodeKind::hidden);
        }
        t.edges = {{5, 6}, {6, 7}, {order[0], 5}, {order[1], 5},
                   {order[2], 6}, {order[3], 7}, {order[4], 7}};
        return t;
    };
    const LatentTree a = caterpillar({0, 1, 2, 3, 4});
    const LatentTree b = caterpillar({0, 2, 1, 3, 4});
    CHECK(rf_distance(a, b) == oracle_rf(a, b));
    CHECK(rf_distance(a, b) == 2);
}

TEST_CASE("rf rejects mismatched observed label sets") {
    const LatentTree a = build_hmm(4);
    const LatentTree b = build_hmm(6);
    CHECK_THROWS_AS(rf_distance(a, b), std::invalid_argument);
}

TEST_CASE("rf agrees with the brute-force oracle on random tree pairs") {
    Rng rng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        const int o = 4 + static_cast<int>(rng.below(7));
        const LatentTree a = random_tree(rng, o);
        const LatentTree b = random_tree(rng, o);
        CHECK(rf_distance(a, b) == oracle_rf(a, b));
    }
}

TEST_CASE("rf is a pseudometric on split sets") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int o = 4 + static_cast<int>(rng.below(6));
        const LatentTree a = random_tree(rng, o);
        const LatentTree b = random_tree(rng, o);
        const LatentTree c = random_tree(rng, o);
        const int ab = rf_distance(a, b);
        const int ba = rf_distance(b, a);
        CHECK(ab == ba);
        CHECK(rf_distance(a, a) == 0);
        CHECK(ab <= rf_distance(a, c) + rf_distance(c, b));
        if (oracle_splits(a) == oracle_splits(b)) CHECK(ab == 0);
    }
}

TEST_CASE("worst-case rf bounds any learner outcome") {
    const LatentTree truth = build_double_binary(5);
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const LatentTree guess = random_tree(rng, truth.observed_count());
        CHECK(rf_distance(truth, guess) <= rf_worst_case(truth));
    }
}

TEST_CASE("error rate is the fraction of nonzero rows") {
    CHECK(error_rate({0, 0, 0}) == 0.0);
    CHECK(error_rate({0, 1, 0, 2}) == 0.5);
    CHECK(error_rate({3}) == 1.0);
    CHECK_THROWS_AS(error_rate({}), std::invalid_argument);
}
